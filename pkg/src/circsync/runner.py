"""End-to-end pipeline from netlist text and run configuration to traces.

run_scenario chains the full sequence: parse, assemble, regularize any
capacitance-free node, build the first-order system, quantize (unless
the method is classical), integrate, then run the synchronization and
eigenmode analyses.  Errors carry the failing stage in their message.
"""

from __future__ import annotations

import warnings
from contextlib import contextmanager

import numpy as np

from .analysis import SyncReport, sync_report
from .config import ConfigError, RunConfig
from .constants import CONSTANTS, PhysicalConstants
from .eom import (
    EigenReport,
    FirstOrderSystem,
    build_system,
    eigenfrequencies,
    integrate_classical,
    trajectory_energy,
)
from .netlist import parse_netlist
from .quantum import (
    TimeSeries,
    auxiliary_current_trace,
    build_workspace,
    integrate_quantum,
    natural_periods,
    zero_point_scales,
)
from .topology import (
    CircuitModel,
    assemble_matrices,
    detect_singular_capacitance,
    insert_auxiliary_capacitor,
)

DEFAULT_DIM = 3
JUNCTION_DIM = 4
AUX_DIM = 2
STEPS_PER_PERIOD = 200


@contextmanager
def _stage(name: str):
    # label ValueErrors (and subclasses) with the pipeline stage they came from
    try:
        yield
    except ValueError as err:
        if getattr(err, "staged", False):
            raise
        wrapped = type(err)(f"{name}: {err}")
        wrapped.staged = True
        raise wrapped from err


def resolve_method(config: RunConfig, model: CircuitModel) -> str:
    method = config.method
    if method == "auto":
        method = "rk4-full" if model.junctions else "linear-propagator"
    if method == "linear-propagator" and model.junctions:
        raise ConfigError("method linear-propagator cannot integrate junction terms")
    return method


def resolve_dims(config: RunConfig, model: CircuitModel) -> tuple[int, ...]:
    if config.dims is not None:
        if len(config.dims) != model.n_dof:
            raise ConfigError(
                f"dims has {len(config.dims)} entries for a {model.n_dof}-DOF circuit"
            )
        return config.dims
    junction_nodes = {node for node, _ in model.junctions}
    return tuple(
        JUNCTION_DIM
        if k in junction_nodes
        else AUX_DIM
        if k in model.auxiliary_nodes
        else DEFAULT_DIM
        for k in range(1, model.n_dof + 1)
    )


def resolve_dt(config: RunConfig, model: CircuitModel, method: str, periods: np.ndarray) -> float:
    """T_min/200 with T_min over every DOF; the propagator path is exact
    per step, so there dt only sets the sampling grid and the stiff
    auxiliary resonance is excluded from the minimum."""
    if config.dt != "auto":
        return float(config.dt)
    if method == "linear-propagator":
        relevant = [periods[k - 1] for k in range(1, model.n_dof + 1) if k not in model.auxiliary_nodes]
    else:
        relevant = list(periods)
    t_min = min(relevant) if relevant else np.inf
    if not np.isfinite(t_min):
        raise ConfigError("cannot choose dt automatically: no finite oscillation period")
    return float(t_min) / STEPS_PER_PERIOD


def _classical_series(
    model: CircuitModel,
    sys: FirstOrderSystem,
    pairs,
    dt: float,
    t_end: float,
    k_j: float,
    constants: PhysicalConstants,
) -> TimeSeries:
    """Integrate the c-number equations from matched initial expectations."""
    n = model.n_dof
    scales = np.empty((n, 3))
    x0 = np.empty(2 * n)
    for k in range(1, n + 1):
        q0, phi0, z = zero_point_scales(model, constants, k)
        scales[k - 1] = (q0, phi0, z)
        alpha, beta = pairs[k - 1]
        norm = abs(alpha) ** 2 + abs(beta) ** 2
        if norm == 0:
            raise ValueError("alpha and beta cannot both be zero")
        a_mean = np.conj(alpha) * beta / norm
        x0[k - 1] = q0 * 2.0 * a_mean.imag
        x0[n + k - 1] = phi0 * 2.0 * a_mean.real
    traj = integrate_classical(sys, x0, dt, t_end)
    energy, dissipation = trajectory_energy(model, traj, k_j)
    return TimeSeries(
        times=traj.times,
        q=traj.q / scales[:, 0],
        phi=traj.phi / scales[:, 1],
        energy=energy,
        dissipation=dissipation,
        scales=scales,
    )


def run_scenario(
    netlist_text: str,
    config: RunConfig,
    constants: PhysicalConstants = CONSTANTS,
    label: str = "netlist",
) -> tuple[TimeSeries, SyncReport | None, EigenReport]:
    with _stage("parse"):
        spec = parse_netlist(netlist_text)

    with _stage("assemble"):
        model = assemble_matrices(spec)
        singular = detect_singular_capacitance(model)
        for node in singular:
            spec = insert_auxiliary_capacitor(spec, node, config.aux_value)
            added = spec.elements[-1]
            warnings.warn(
                f"node {node} has no capacitance; inserted auxiliary capacitor "
                f"{added.name} = {added.value:g} F across nodes {added.node_a}-{added.node_b}",
                stacklevel=2,
            )
        if singular:
            model = assemble_matrices(spec)

    with _stage("configure"):
        k_j = config.k_j if config.k_j is not None else constants.k_J
        sys = build_system(model, k_J=k_j)
        method = resolve_method(config, model)
        dims = resolve_dims(config, model)
        periods = natural_periods(model, constants)
        dt = resolve_dt(config, model, method, periods)
        for k in config.initial:
            if not 1 <= k <= model.n_dof:
                raise ConfigError(f"initial state given for DOF {k}, circuit has {model.n_dof}")
        pairs = [
            config.initial.get(k, (complex(1.0), complex(0.0)))
            for k in range(1, model.n_dof + 1)
        ]

    with _stage("integrate"):
        if method == "classical":
            series = _classical_series(model, sys, pairs, dt, config.t_end, k_j, constants)
        else:
            ws = build_workspace(model, dims, pairs, constants)
            series = integrate_quantum(ws, sys, model, dt, config.t_end, method=method)
        series.t_ref = float(periods[0])
        series.metadata = {
            "source": label,
            "method": method,
            "n_dof": model.n_dof,
            "dims": "" if method == "classical" else ",".join(str(d) for d in dims),
            "dt": dt,
            "t_end": config.t_end,
            "t_ref": series.t_ref,
            "k_j": k_j,
            "auxiliary_nodes": ",".join(str(k) for k in model.auxiliary_nodes),
        }
        if model.auxiliary_nodes:
            series.aux_current = auxiliary_current_trace(model, sys, series, constants)

    report = None
    non_aux = [k for k in range(1, model.n_dof + 1) if k not in model.auxiliary_nodes]
    if len(non_aux) >= 2:
        try:
            report = sync_report(series, pair=(non_aux[0], non_aux[1]), tolerances=config.tolerances)
        except ValueError as err:
            warnings.warn(f"synchronization analysis skipped: {err}", stacklevel=2)

    eigen = eigenfrequencies(sys)
    return series, report, eigen
