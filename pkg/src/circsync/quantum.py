"""Fock-space quantization and Heisenberg-picture integration.

Each node gets a truncated bosonic pair (q_k, phi_k) built from the
annihilation operator on its own factor of the tensor product:

    q_k = Q_k0 (a - a+)/i,   phi_k = Phi_k0 (a + a+)

embedded with Kronecker products in DOF order.  The zero-point scales
come from the bare per-node impedance Z_k = sqrt(L_k/C_k) of the grounded
elements at the node (junctions count through L_J = 1/(I_c0 k_J); a
branch node with nothing to ground uses its branch values).  The coupled
matrix-diagonal impedance is deliberately not used here: the bare scale
is the one that makes an isolated resonator's normalized charge and flux
traces unit circles, so equal energy sharing lands at amplitude 1/2.

The state is fixed (Heisenberg picture); operator matrices evolve under
exactly the same coefficient matrix as the classical system.  Linear
circuits can alternatively be integrated by propagating the 2N x 2N
coefficient matrix with exp(m dt), which is exact per step and does not
care about stiffness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi, sqrt

import numpy as np
import scipy.linalg

from .constants import CONSTANTS, PhysicalConstants
from .eom import FirstOrderSystem
from .topology import CircuitModel, local_params


@dataclass(frozen=True)
class FockSpec:
    dims: tuple[int, ...]

    def __post_init__(self):
        if any(d < 2 for d in self.dims):
            raise ValueError(f"every truncation must be >= 2, got {self.dims}")

    @property
    def total_dim(self) -> int:
        out = 1
        for d in self.dims:
            out *= d
        return out


@dataclass
class QuantumWorkspace:
    fock: FockSpec
    q_ops: np.ndarray  # (N, D, D) complex, operators at t0
    phi_ops: np.ndarray
    state: np.ndarray  # (D,) complex, unit norm
    scales: np.ndarray  # (N, 3): Q_k0, Phi_k0, Z_k


@dataclass
class TimeSeries:
    """Normalized expectation traces plus run diagnostics."""

    times: np.ndarray  # (S,)
    q: np.ndarray  # (S, N), <q_k>/Q_k0
    phi: np.ndarray  # (S, N), <phi_k>/Phi_k0
    energy: np.ndarray  # (S,), <H> in joules
    dissipation: np.ndarray  # (S,), <D> in watts
    scales: np.ndarray
    t_ref: float = 0.0  # bare period of DOF 1, for t/T normalization
    comm_times: np.ndarray | None = None
    comm_dev: np.ndarray | None = None  # max_k relative drift of [phi_k, q_k]
    final_ops: np.ndarray | None = None  # (2N, D, D) at t_end
    aux_current: np.ndarray | None = None  # (S,), <dq_aux/dt>/I_0 when an aux node exists
    metadata: dict = field(default_factory=dict)

    @property
    def n_dof(self) -> int:
        return self.q.shape[1]


def annihilation(n: int) -> np.ndarray:
    """Truncated bosonic annihilation operator, a[i, i+1] = sqrt(i+1)."""
    if n < 2:
        raise ValueError(f"need dimension >= 2, got {n}")
    return np.diag(np.sqrt(np.arange(1.0, n)), k=1).astype(complex)


def embed_operator(op: np.ndarray, k: int, fock: FockSpec) -> np.ndarray:
    """Kronecker-embed a per-DOF operator at slot k (1-based, DOF order)."""
    if op.shape != (fock.dims[k - 1], fock.dims[k - 1]):
        raise ValueError(
            f"operator shape {op.shape} does not match dims[{k}] = {fock.dims[k - 1]}"
        )
    out = np.array([[1.0 + 0j]])
    for slot, d in enumerate(fock.dims, start=1):
        out = np.kron(out, op if slot == k else np.eye(d, dtype=complex))
    return out


def zero_point_scales(
    model: CircuitModel, constants: PhysicalConstants, k: int
) -> tuple[float, float, float]:
    """Ground-state charge and flux scales (Q_k0, Phi_k0, Z_k) at DOF k.

    Z_k is the bare per-node impedance described in the module docstring;
    for a junction node this reduces to sqrt(L_J/C_q).
    """
    extra_linv = sum(ic0 * constants.k_J for node, ic0 in model.junctions if node == k)
    c_loc, linv_loc = local_params(model, k, extra_linv)
    if c_loc <= 0 or linv_loc <= 0:
        raise ValueError(f"DOF {k}: no usable L/C pair, impedance undefined")
    z = 1.0 / sqrt(linv_loc * c_loc)
    q0 = sqrt(constants.hbar / (2.0 * z))
    return q0, z * q0, z


def natural_periods(model: CircuitModel, constants: PhysicalConstants = CONSTANTS) -> np.ndarray:
    """Bare per-DOF oscillation periods 2 pi sqrt(L_k C_k) (inf if no inductance)."""
    periods = np.empty(model.n_dof)
    for k in range(1, model.n_dof + 1):
        extra = sum(ic0 * constants.k_J for node, ic0 in model.junctions if node == k)
        c_loc, linv_loc = local_params(model, k, extra)
        periods[k - 1] = 2.0 * pi * sqrt(c_loc / linv_loc) if linv_loc > 0 else np.inf
    return periods


def build_initial_state(pairs, fock: FockSpec) -> np.ndarray:
    """Product state of per-DOF (alpha|0> + beta|1>) superpositions."""
    if len(pairs) != len(fock.dims):
        raise ValueError(f"need {len(fock.dims)} (alpha, beta) pairs, got {len(pairs)}")
    state = np.array([1.0 + 0j])
    for (alpha, beta), d in zip(pairs, fock.dims):
        norm = abs(alpha) ** 2 + abs(beta) ** 2
        if norm == 0:
            raise ValueError("alpha and beta cannot both be zero")
        local = np.zeros(d, dtype=complex)
        local[0] = alpha
        local[1] = beta
        state = np.kron(state, local / sqrt(norm))
    return state


def build_workspace(
    model: CircuitModel,
    dims,
    pairs,
    constants: PhysicalConstants = CONSTANTS,
) -> QuantumWorkspace:
    fock = FockSpec(tuple(dims))
    if len(fock.dims) != model.n_dof:
        raise ValueError(f"need {model.n_dof} truncations, got {len(fock.dims)}")
    d_total = fock.total_dim
    q_ops = np.empty((model.n_dof, d_total, d_total), dtype=complex)
    phi_ops = np.empty_like(q_ops)
    scales = np.empty((model.n_dof, 3))
    for k in range(1, model.n_dof + 1):
        a = annihilation(fock.dims[k - 1])
        q0, phi0, z = zero_point_scales(model, constants, k)
        scales[k - 1] = (q0, phi0, z)
        q_ops[k - 1] = q0 * embed_operator((a - a.conj().T) / 1j, k, fock)
        phi_ops[k - 1] = phi0 * embed_operator(a + a.conj().T, k, fock)
    return QuantumWorkspace(
        fock=fock, q_ops=q_ops, phi_ops=phi_ops, state=build_initial_state(pairs, fock), scales=scales
    )


def _hermiticity_defect(op: np.ndarray) -> float:
    scale = np.linalg.norm(op)
    if scale == 0:
        return 0.0
    return np.linalg.norm(op - op.conj().T) / scale


def matrix_sine(phi_op: np.ndarray, k_j: float) -> np.ndarray:
    """sin(k_J phi) of a Hermitian operator via eigendecomposition."""
    if _hermiticity_defect(phi_op) > 1e-10:
        raise ValueError("matrix_sine needs a Hermitian input")
    w, v = np.linalg.eigh(phi_op)
    return (v * np.sin(k_j * w)) @ v.conj().T


def _matrix_cosine(phi_op: np.ndarray, k_j: float) -> np.ndarray:
    w, v = np.linalg.eigh(phi_op)
    return (v * np.cos(k_j * w)) @ v.conj().T


def quantum_rhs(sys: FirstOrderSystem, ops: np.ndarray) -> np.ndarray:
    """Apply the classical coefficient matrix entrywise to operator matrices.

    ops is the (2N, D, D) stack (q rows first, then phi rows); junction
    rows pick up -I_c0 sin(k_J phi_k).
    """
    out = np.tensordot(sys.m, ops, axes=(1, 0))
    for k, ic0, k_j in sys.junction_terms:
        out[k - 1] -= ic0 * matrix_sine(ops[sys.n_dof + k - 1], k_j)
    return out


def _second_moment_weights(model: CircuitModel, cinv: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = model.n_dof
    w_energy = np.zeros((2 * n, 2 * n))
    w_energy[:n, :n] = cinv
    w_energy[n:, n:] = model.linv
    w_diss = np.zeros((2 * n, 2 * n))
    w_diss[:n, :n] = cinv @ model.rinv @ cinv
    return w_energy, w_diss


def _junction_energy(junction_terms, phi_ops: np.ndarray, state: np.ndarray) -> float:
    total = 0.0
    for k, ic0, k_j in junction_terms:
        ej0 = ic0 / k_j
        cosm = _matrix_cosine(phi_ops[k - 1], k_j)
        total += ej0 * (1.0 - np.real(np.vdot(state, cosm @ state)))
    return total


def _commutator_drift(ops: np.ndarray, ref: np.ndarray, n: int) -> float:
    worst = 0.0
    for k in range(n):
        comm = ops[n + k] @ ops[k] - ops[k] @ ops[n + k]
        worst = max(worst, np.linalg.norm(comm - ref[k]) / np.linalg.norm(ref[k]))
    return worst


def integrate_quantum(
    ws: QuantumWorkspace,
    sys: FirstOrderSystem,
    model: CircuitModel,
    dt: float,
    t_end: float,
    method: str = "rk4-full",
    diag_stride: int = 0,
) -> TimeSeries:
    """Integrate the operator equations and return normalized traces.

    method "rk4-full" advances the full operator stack with fixed-step
    RK4; "linear-propagator" (linear circuits only) multiplies the 2N x 2N
    coefficient matrix by exp(m dt) each step, exact to round-off at any
    step size.  diag_stride > 0 also records the relative drift of the
    per-DOF commutators [phi_k, q_k] every that many steps.
    """
    if method not in ("rk4-full", "linear-propagator"):
        raise ValueError(f"unknown method {method!r}")
    if method == "linear-propagator" and sys.junction_terms:
        raise ValueError("linear-propagator cannot integrate junction terms")
    if dt <= 0 or t_end <= 0:
        raise ValueError("need dt > 0 and t_end > 0")
    n = sys.n_dof
    steps = int(round(t_end / dt))
    psi = ws.state
    ops0 = np.concatenate([ws.q_ops, ws.phi_ops], axis=0)
    w_energy, w_diss = _second_moment_weights(model, sys.cinv)
    comm0 = [ops0[n + k] @ ops0[k] - ops0[k] @ ops0[n + k] for k in range(n)]
    comm_t, comm_v = [], []

    if method == "rk4-full":
        z = np.empty((steps + 1, 2 * n), dtype=complex)
        energy = np.empty(steps + 1)
        dissipation = np.empty(steps + 1)
        ops = ops0.copy()
        half = dt / 2.0
        for s in range(steps + 1):
            w = ops @ psi
            z[s] = w @ psi.conj()
            gram = w.conj() @ w.T
            energy[s] = 0.5 * np.sum(w_energy * gram).real + _junction_energy(
                sys.junction_terms, ops[n:], psi
            )
            dissipation[s] = 0.5 * np.sum(w_diss * gram).real
            if diag_stride and s % diag_stride == 0:
                comm_t.append(s * dt)
                comm_v.append(_commutator_drift(ops, comm0, n))
            if s == steps:
                break
            k1 = quantum_rhs(sys, ops)
            k2 = quantum_rhs(sys, ops + half * k1)
            k3 = quantum_rhs(sys, ops + half * k2)
            k4 = quantum_rhs(sys, ops + dt * k3)
            ops = ops + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
            if not np.all(np.isfinite(ops)):
                raise FloatingPointError(f"non-finite operator at step {s + 1}")
        final_ops = ops
    else:
        prop = scipy.linalg.expm(sys.m * dt)
        coeffs = np.empty((steps + 1, 2 * n, 2 * n))
        coeffs[0] = np.eye(2 * n)
        for s in range(1, steps + 1):
            coeffs[s] = prop @ coeffs[s - 1]
        if not np.all(np.isfinite(coeffs[-1])):
            raise FloatingPointError("propagator blew up; check the circuit for gain")
        w0 = ops0 @ psi
        z0 = w0 @ psi.conj()
        if np.abs(z0.imag).max() > 1e-9:
            raise ValueError("initial operators are not Hermitian enough")
        z = coeffs @ z0.real
        gram0 = w0.conj() @ w0.T
        gram_t = coeffs @ gram0 @ coeffs.transpose(0, 2, 1)
        energy = 0.5 * np.einsum("sij,ij->s", gram_t, w_energy).real
        dissipation = 0.5 * np.einsum("sij,ij->s", gram_t, w_diss).real
        if diag_stride:
            for s in range(0, steps + 1, diag_stride):
                ops_s = np.tensordot(coeffs[s], ops0, axes=(1, 0))
                comm_t.append(s * dt)
                comm_v.append(_commutator_drift(ops_s, comm0, n))
        final_ops = np.tensordot(coeffs[-1], ops0, axes=(1, 0))

    z = np.asarray(z)
    if np.abs(z.imag).max() > 1e-9 * max(1.0, np.abs(z.real).max()):
        raise ValueError(
            "expectation traces have imaginary residue "
            f"{np.abs(z.imag).max():.3g}; operator Hermiticity was lost"
        )
    traces = z.real / np.concatenate([ws.scales[:, 0], ws.scales[:, 1]])
    return TimeSeries(
        times=np.arange(steps + 1) * dt,
        q=traces[:, :n],
        phi=traces[:, n:],
        energy=energy,
        dissipation=dissipation,
        scales=ws.scales.copy(),
        comm_times=np.array(comm_t) if comm_t else None,
        comm_dev=np.array(comm_v) if comm_v else None,
        final_ops=final_ops,
    )


def expectation_traces(ws: QuantumWorkspace, operator_histories: np.ndarray) -> np.ndarray:
    """Normalized expectations of a (S, 2N, D, D) operator history stack."""
    w = operator_histories @ ws.state
    z = w @ ws.state.conj()
    if np.abs(z.imag).max() > 1e-9 * max(1.0, np.abs(z.real).max()):
        raise ValueError("imaginary residue in expectation values; Hermiticity lost")
    n = ws.scales.shape[0]
    return z.real / np.concatenate([ws.scales[:, 0], ws.scales[:, 1]])


def auxiliary_current_trace(
    model: CircuitModel,
    sys: FirstOrderSystem,
    series: TimeSeries,
    constants: PhysicalConstants = CONSTANTS,
    finite_difference: bool = False,
) -> np.ndarray:
    """Normalized current <dq/dt> of the auxiliary DOF.

    Evaluated through the charge row of the system matrix (the current
    balance at the node); finite_difference=True instead differences the
    charge trace numerically, as an independent cross-check.  Normalized
    by I_0 = sqrt(h f_r / 2 L) of the auxiliary branch.
    """
    if not model.auxiliary_nodes:
        raise ValueError("circuit has no auxiliary node")
    k = model.auxiliary_nodes[0]
    i = k - 1
    l_branch = 1.0 / model.linv[i, i]
    c_branch = model.cmat[i, i]
    f_res = 1.0 / (2.0 * pi * sqrt(l_branch * c_branch))
    i_scale = sqrt(constants.h * f_res / (2.0 * l_branch))
    q_phys = series.q * series.scales[:, 0]
    if finite_difference:
        return np.gradient(q_phys[:, i], series.times) / i_scale
    phi_phys = series.phi * series.scales[:, 1]
    x_phys = np.concatenate([q_phys, phi_phys], axis=1)
    return (x_phys @ sys.m[i]) / i_scale
