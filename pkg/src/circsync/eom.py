"""First-order circuit equations of motion and classical integration.

The state is x = (q_1..q_N, phi_1..phi_N).  The linear part is

    m = [[-rinv @ cinv, -linv],
         [        cinv,     0]]

so qdot rows carry the resistive currents and inductive restoring terms
while phidot rows are just the node voltages cinv @ q.  Each junction
adds -I_c0 sin(k_J phi_k) to its qdot row; junctions never enter the
linear blocks.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .constants import CONSTANTS
from .topology import CircuitModel


@dataclass(frozen=True)
class FirstOrderSystem:
    n_dof: int
    m: np.ndarray
    cinv: np.ndarray
    junction_terms: tuple[tuple[int, float, float], ...]  # (dof k, I_c0, k_J)


@dataclass(frozen=True)
class ClassicalTrajectory:
    times: np.ndarray  # (S,)
    states: np.ndarray  # (S, 2N)

    @property
    def q(self) -> np.ndarray:
        return self.states[:, : self.states.shape[1] // 2]

    @property
    def phi(self) -> np.ndarray:
        return self.states[:, self.states.shape[1] // 2 :]


@dataclass(frozen=True)
class EigenReport:
    """Complex eigenvalues s of the linearized system, conjugate-paired.

    modes holds one (damping, angular_frequency) entry per pair, sorted
    by |Im s|; damping is -Re s.
    """

    eigenvalues: np.ndarray
    modes: tuple[tuple[float, float], ...]


def build_system(model: CircuitModel, k_J: float = CONSTANTS.k_J) -> FirstOrderSystem:
    """Assemble the 2N x 2N system matrix and the junction term list."""
    n = model.n_dof
    cond = np.linalg.cond(model.cmat)
    if not np.isfinite(cond) or cond > 1e14:
        raise ValueError(
            "capacitance matrix is singular or nearly so "
            f"(condition number {cond:.3g}); insert an auxiliary capacitor first"
        )
    cinv = np.linalg.inv(model.cmat)
    m = np.zeros((2 * n, 2 * n))
    m[:n, :n] = -model.rinv @ cinv
    m[:n, n:] = -model.linv
    m[n:, :n] = cinv
    for k, _ in model.junctions:
        if model.linv[k - 1, k - 1] > 0:
            warnings.warn(
                f"node {k} carries both a junction and an inductor; "
                "their currents add",
                stacklevel=2,
            )
    terms = tuple((k, ic0, k_J) for k, ic0 in model.junctions)
    return FirstOrderSystem(n_dof=n, m=m, cinv=cinv, junction_terms=terms)


def classical_rhs(sys: FirstOrderSystem, x: np.ndarray) -> np.ndarray:
    xdot = sys.m @ x
    for k, ic0, k_j in sys.junction_terms:
        xdot[k - 1] -= ic0 * np.sin(k_j * x[sys.n_dof + k - 1])
    return xdot


def integrate_classical(
    sys: FirstOrderSystem, x0: np.ndarray, dt: float, t_end: float
) -> ClassicalTrajectory:
    """Fixed-step RK4 trajectory, sampled every step."""
    if dt <= 0 or t_end < 0:
        raise ValueError("need dt > 0 and t_end >= 0")
    steps = int(round(t_end / dt))
    states = np.empty((steps + 1, 2 * sys.n_dof))
    x = np.asarray(x0, dtype=float).copy()
    states[0] = x
    half = dt / 2.0
    for s in range(1, steps + 1):
        k1 = classical_rhs(sys, x)
        k2 = classical_rhs(sys, x + half * k1)
        k3 = classical_rhs(sys, x + half * k2)
        k4 = classical_rhs(sys, x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        if not np.all(np.isfinite(x)):
            raise FloatingPointError(f"non-finite state at step {s} (t = {s * dt:.6g} s)")
        states[s] = x
    return ClassicalTrajectory(times=np.arange(steps + 1) * dt, states=states)


def linearized_matrix(sys: FirstOrderSystem) -> np.ndarray:
    """System matrix with each junction replaced by its inductance L_J."""
    m = sys.m.copy()
    n = sys.n_dof
    for k, ic0, k_j in sys.junction_terms:
        m[k - 1, n + k - 1] -= ic0 * k_j  # 1/L_J = I_c0 k_J
    return m


def eigenfrequencies(sys: FirstOrderSystem) -> EigenReport:
    """Complex eigenvalues of the (junction-linearized) system matrix."""
    vals = np.linalg.eigvals(linearized_matrix(sys))
    order = np.lexsort((vals.real, -vals.imag, np.abs(vals.imag)))
    vals = vals[order]
    scale = max(np.abs(vals).max(), 1.0)
    used = np.zeros(len(vals), dtype=bool)
    modes = []
    for i, s in enumerate(vals):
        if used[i]:
            continue
        used[i] = True
        partner = None
        for j in range(i + 1, len(vals)):
            if not used[j] and abs(vals[j] - np.conj(s)) <= 1e-9 * scale:
                partner = j
                break
        if partner is not None:
            used[partner] = True
        modes.append((-float(s.real), float(abs(s.imag))))
    return EigenReport(eigenvalues=vals, modes=tuple(modes))


def trajectory_energy(
    model: CircuitModel, traj: ClassicalTrajectory, k_J: float = CONSTANTS.k_J
) -> tuple[np.ndarray, np.ndarray]:
    """energy_and_dissipation evaluated along a whole trajectory."""
    q, phi = traj.q, traj.phi
    v = q @ np.linalg.inv(model.cmat).T
    energy = 0.5 * np.einsum("si,si->s", q, v) + 0.5 * np.einsum(
        "si,si->s", phi, phi @ model.linv.T
    )
    for k, ic0 in model.junctions:
        ej0 = ic0 / k_J
        energy = energy + ej0 * (1.0 - np.cos(k_J * phi[:, k - 1]))
    dissipation = 0.5 * np.einsum("si,si->s", v, v @ model.rinv.T)
    return energy, dissipation


def energy_and_dissipation(
    model: CircuitModel, x: np.ndarray, k_J: float = CONSTANTS.k_J
) -> tuple[float, float]:
    """Stored energy and Rayleigh dissipation function at a state.

    E = q^T cinv q / 2 + phi^T linv phi / 2, with each junction
    contributing E_J0 (1 - cos(k_J phi_k)) so its energy is zero at rest.
    D = phidot^T rinv phidot / 2 with phidot = cinv q; along any
    trajectory dE/dt = -2 D.
    """
    n = model.n_dof
    q, phi = x[:n], x[n:]
    v = np.linalg.solve(model.cmat, q)
    energy = 0.5 * (q @ v) + 0.5 * (phi @ (model.linv @ phi))
    for k, ic0 in model.junctions:
        ej0 = ic0 / k_J
        energy += ej0 * (1.0 - np.cos(k_J * phi[k - 1]))
    dissipation = 0.5 * (v @ (model.rinv @ v))
    return float(energy), float(dissipation)
