"""Circuit matrix assembly and pathological-topology handling.

Every element between nodes i and j stamps the usual two-terminal
pattern into its matrix: +val on both diagonal entries, -val on the two
off-diagonal entries, with the ground row/column dropped.  Capacitors
fill the capacitance matrix, inductors the inverse-inductance matrix
(1/L), resistors the inverse-resistance matrix (1/R).  Junctions are not
stamped; they are carried as per-node nonlinear terms.

A node whose capacitance row is identically zero has no conjugate charge
coordinate, so the circuit Hamiltonian is incomplete and the dynamics
are ill-posed.  Such nodes are reported by detect_singular_capacitance
and repaired by insert_auxiliary_capacitor, which adds a small capacitor
carrying the missing coordinate.  When the singular node hangs off a
single inductive branch the auxiliary capacitor is placed across that
branch (sharing its flux), which keeps the completed circuit's equations
in the plain branch form; otherwise it goes to ground.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .netlist import CircuitSpec, ElementDecl, NetlistError


@dataclass(frozen=True)
class CircuitModel:
    """Assembled N-DOF circuit: matrices plus junction and node metadata.

    DOF indices in the public API are 1-based node ids; matrix rows and
    columns are the same DOFs shifted down by one.
    """

    n_dof: int
    cmat: np.ndarray
    linv: np.ndarray
    rinv: np.ndarray
    junctions: tuple[tuple[int, float], ...]
    node_names: tuple[str, ...]
    auxiliary_nodes: tuple[int, ...]


@dataclass(frozen=True)
class ConstraintCount:
    kvl_count: int
    kcl_count: int
    chosen: str = "KVL"


def assemble_matrices(spec: CircuitSpec) -> CircuitModel:
    """Stamp all elements of a spec into the three circuit matrices."""
    n = spec.n_nodes
    cmat = np.zeros((n, n))
    cmat_bare = np.zeros((n, n))  # capacitance without auxiliary elements
    linv = np.zeros((n, n))
    rinv = np.zeros((n, n))
    junctions: list[tuple[int, float]] = []
    aux_elements: list[ElementDecl] = []

    def stamp(target: np.ndarray, i: int, j: int, val: float) -> None:
        if i >= 0:
            target[i, i] += val
        if j >= 0:
            target[j, j] += val
        if i >= 0 and j >= 0:
            target[i, j] -= val
            target[j, i] -= val

    for e in spec.elements:
        if e.kind == "junction":
            if e.node_a != 0 and e.node_b != 0:
                raise NetlistError(
                    f"junction {e.name} connects nodes {e.node_a}-{e.node_b}; "
                    "junctions must have one terminal on ground"
                )
            junctions.append((max(e.node_a, e.node_b), e.value))
            continue
        i, j = e.node_a - 1, e.node_b - 1
        if e.kind == "capacitor":
            stamp(cmat, i, j, e.value)
            if e.auxiliary:
                aux_elements.append(e)
            else:
                stamp(cmat_bare, i, j, e.value)
        elif e.kind == "inductor":
            stamp(linv, i, j, 1.0 / e.value)
        else:
            stamp(rinv, i, j, 1.0 / e.value)

    # the auxiliary node is the terminal the capacitor repairs: the one
    # with no other capacitive connection
    aux_nodes = sorted(
        {
            node
            for e in aux_elements
            for node in (e.node_a, e.node_b)
            if node != 0 and not cmat_bare[node - 1].any()
        }
    )

    return CircuitModel(
        n_dof=n,
        cmat=cmat,
        linv=linv,
        rinv=rinv,
        junctions=tuple(junctions),
        node_names=tuple(str(k) for k in range(1, n + 1)),
        auxiliary_nodes=tuple(aux_nodes),
    )


def detect_singular_capacitance(model: CircuitModel) -> list[int]:
    """Nodes whose capacitance row is identically zero (1-based ids)."""
    return [k + 1 for k in range(model.n_dof) if not model.cmat[k].any()]


def _aux_partner(spec: CircuitSpec, node: int) -> int:
    """Other terminal for the auxiliary capacitor at a singular node.

    Across the node's inductive branch when there is exactly one, so the
    new charge coordinate is conjugate to that branch flux; ground
    otherwise.
    """
    inductor_partners = [
        e.node_b if e.node_a == node else e.node_a
        for e in spec.elements
        if e.kind == "inductor" and node in (e.node_a, e.node_b)
    ]
    if len(inductor_partners) == 1:
        return inductor_partners[0]
    return 0


def insert_auxiliary_capacitor(
    spec: CircuitSpec, node: int, value: float | None = None
) -> CircuitSpec:
    """Complete the Hamiltonian at a capacitance-free node.

    value defaults to the smallest capacitance in the circuit divided by
    100, small enough that the added branch barely loads the rest of the
    circuit while making the capacitance matrix invertible.
    """
    model = assemble_matrices(spec)
    singular = detect_singular_capacitance(model)
    if node not in singular:
        raise NetlistError(f"node {node} is not capacitance-singular (singular nodes: {singular})")
    if value is None:
        caps = [e.value for e in spec.elements if e.kind == "capacitor"]
        if not caps:
            raise NetlistError("no capacitor in circuit to scale the auxiliary value from")
        value = min(caps) / 100.0
    if value <= 0:
        raise NetlistError(f"auxiliary capacitance must be positive, got {value}")
    partner = _aux_partner(spec, node)
    aux = ElementDecl("capacitor", f"Caux{node}", node, partner, value, auxiliary=True)
    return CircuitSpec(spec.elements + (aux,))


def constraint_counts(spec: CircuitSpec) -> ConstraintCount:
    """Independent constraint counts: KVL gives B-N+1, KCL gives N-1.

    N counts the ground node.  The loop (KVL) form is the one actually
    imposed by the assembled equations; it stays valid when local
    resistors are added to a branch, which the node form does not.
    """
    n_total = spec.n_nodes + 1
    b = len(spec.elements)
    return ConstraintCount(kvl_count=b - n_total + 1, kcl_count=n_total - 1, chosen="KVL")


def effective_params(model: CircuitModel, k: int) -> tuple[float, float, float]:
    """Matrix-diagonal effective inductance, capacitance and impedance at DOF k.

    These are the coupled values (local element plus every coupler tied
    to the node).  Returns (L_eff, C_eff, Z_eff) with Z = sqrt(L/C).
    """
    i = k - 1
    if model.linv[i, i] <= 0 or model.cmat[i, i] <= 0:
        raise ValueError(f"DOF {k}: zero diagonal, effective parameters undefined")
    l_eff = 1.0 / model.linv[i, i]
    c_eff = model.cmat[i, i]
    return l_eff, c_eff, float(np.sqrt(l_eff / c_eff))


def local_params(model: CircuitModel, k: int, extra_linv: float = 0.0) -> tuple[float, float]:
    """Bare grounded capacitance and inverse inductance at DOF k.

    Row sums cancel node-to-node couplers, leaving only the elements tied
    straight to ground.  A DOF with no grounded element of one kind (an
    auxiliary branch node, say) falls back to the matrix diagonal, which
    for such a node is just the branch value.  extra_linv folds in a
    junction's 1/L_J.
    """
    i = k - 1
    c_loc = float(model.cmat[i].sum())
    if c_loc <= 1e-12 * model.cmat[i, i]:
        c_loc = float(model.cmat[i, i])
    linv_loc = float(model.linv[i].sum()) + extra_linv
    if linv_loc <= 1e-12 * (model.linv[i, i] + extra_linv):
        linv_loc = float(model.linv[i, i]) + extra_linv
    return c_loc, linv_loc
