"""Quantum and classical dynamics of lossy superconducting circuit networks.

Parse a netlist, assemble the circuit matrices, build the first-order
equations of motion (with Josephson junctions as per-node nonlinear
terms), quantize in truncated Fock space, integrate, and analyze the
resulting traces for synchronization.  The cli module exposes the same
pipeline as the `circsync` command.
"""

from .analysis import SyncReport, SyncTolerances, fit_decay, peak_envelope, phase_lag, sync_report
from .config import ConfigError, RunConfig, load_config, parse_config
from .constants import CONSTANTS, PhysicalConstants
from .eom import (
    ClassicalTrajectory,
    EigenReport,
    FirstOrderSystem,
    build_system,
    eigenfrequencies,
    energy_and_dissipation,
    integrate_classical,
    linearized_matrix,
    trajectory_energy,
)
from .netlist import (
    CircuitSpec,
    ElementDecl,
    NetlistError,
    format_value,
    parse_netlist,
    parse_value,
    render_netlist,
)
from .presets import Preset, TransmonParameters, preset, transmon_parameters
from .quantum import (
    FockSpec,
    QuantumWorkspace,
    TimeSeries,
    annihilation,
    auxiliary_current_trace,
    build_initial_state,
    build_workspace,
    embed_operator,
    integrate_quantum,
    matrix_sine,
    natural_periods,
    zero_point_scales,
)
from .report import read_csv, write_csv, write_eigen_csv, write_svg
from .runner import run_scenario
from .topology import (
    CircuitModel,
    ConstraintCount,
    assemble_matrices,
    constraint_counts,
    detect_singular_capacitance,
    effective_params,
    insert_auxiliary_capacitor,
    local_params,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
