"""File output: delimited trace data, SVG plots, eigenmode tables.

The CSV layout is a block of `# key: value` metadata lines, a column
header `t,t_norm,q1,phi1,...,energy,dissipation`, then one row per
sample.  Charges and fluxes are the normalized traces (dimensionless),
t is in seconds and t_norm = t / T_ref with the reference period stored
in the metadata.  Numbers are written with repr, which round-trips
doubles exactly, so identical runs give byte-identical files and
read_csv restores the series to full precision.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .eom import EigenReport
from .quantum import TimeSeries

_META_ORDER = (
    "source",
    "method",
    "n_dof",
    "dims",
    "dt",
    "t_end",
    "t_ref",
    "k_j",
    "auxiliary_nodes",
)
_INT_KEYS = ("n_dof",)
_FLOAT_KEYS = ("dt", "t_end", "t_ref", "k_j")


def _format_cell(value: float) -> str:
    return repr(float(value))


def write_csv(series: TimeSeries, path) -> None:
    """Write the series to a delimited text file; see the module docstring."""
    if series.times.size == 0:
        raise ValueError("series is empty, nothing to write")
    n = series.n_dof
    meta = dict(series.metadata)
    lines = []
    for key in _META_ORDER:
        if key in meta:
            lines.append(f"# {key}: {meta.pop(key)}")
    for key in sorted(meta):
        lines.append(f"# {key}: {meta[key]}")
    for name, column in (("q_scales", 0), ("phi_scales", 1), ("z_scales", 2)):
        values = ",".join(_format_cell(v) for v in series.scales[:, column])
        lines.append(f"# {name}: {values}")

    header = ["t", "t_norm"]
    for k in range(1, n + 1):
        header += [f"q{k}", f"phi{k}"]
    header += ["energy", "dissipation"]
    if series.aux_current is not None:
        header.append("aux_current")
    lines.append(",".join(header))

    t_ref = series.t_ref if math.isfinite(series.t_ref) and series.t_ref > 0 else 1.0
    for i, t in enumerate(series.times):
        row = [t, t / t_ref]
        for k in range(n):
            row += [series.q[i, k], series.phi[i, k]]
        row += [series.energy[i], series.dissipation[i]]
        if series.aux_current is not None:
            row.append(series.aux_current[i])
        lines.append(",".join(_format_cell(v) for v in row))

    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def read_csv(path) -> TimeSeries:
    """Rebuild a TimeSeries from a file produced by write_csv."""
    metadata: dict = {}
    header: list[str] | None = None
    rows: list[list[float]] = []
    with open(path, encoding="utf-8") as handle:
        for raw in handle:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                metadata[key.strip()] = value.strip()
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append([float(cell) for cell in line.split(",")])
    if header is None or not rows:
        raise ValueError(f"{path}: no data rows")

    scales_rows = []
    for name in ("q_scales", "phi_scales", "z_scales"):
        text = metadata.pop(name, "")
        scales_rows.append([float(v) for v in text.split(",")] if text else [])
    for key in _INT_KEYS:
        if key in metadata:
            metadata[key] = int(metadata[key])
    for key in _FLOAT_KEYS:
        if key in metadata:
            metadata[key] = float(metadata[key])

    data = np.array(rows)
    has_aux = header[-1] == "aux_current"
    n = (len(header) - 4 - (1 if has_aux else 0)) // 2
    q = data[:, 2 : 2 + 2 * n : 2]
    phi = data[:, 3 : 3 + 2 * n : 2]
    scales = (
        np.array(scales_rows).T
        if all(len(r) == n for r in scales_rows)
        else np.ones((n, 3))
    )
    return TimeSeries(
        times=data[:, 0],
        q=q,
        phi=phi,
        energy=data[:, 2 + 2 * n],
        dissipation=data[:, 3 + 2 * n],
        scales=scales,
        t_ref=float(metadata.get("t_ref", 0.0)),
        aux_current=data[:, -1] if has_aux else None,
        metadata=metadata,
    )


def write_svg(series: TimeSeries, pair: tuple[int, int], path) -> None:
    """Plot the normalized charge traces of a DOF pair against t/T_ref."""
    if series.times.size < 2:
        raise ValueError("need at least 2 samples to plot")
    a, b = pair
    for k in (a, b):
        if not 1 <= k <= series.n_dof:
            raise ValueError(f"DOF {k} out of range 1..{series.n_dof}")
    t_ref = series.t_ref if math.isfinite(series.t_ref) and series.t_ref > 0 else 1.0
    x = series.times / t_ref
    fig, ax = plt.subplots(figsize=(8.0, 4.0))
    ax.plot(x, series.q[:, a - 1], lw=0.9, label=f"$\\langle q_{{{a}}} \\rangle / Q_{{{a}0}}$")
    ax.plot(x, series.q[:, b - 1], lw=0.9, label=f"$\\langle q_{{{b}}} \\rangle / Q_{{{b}0}}$")
    ax.set_xlabel("$t / T_{ref}$")
    ax.set_ylabel("normalized charge")
    ax.legend(loc="upper right")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def eigen_table(eigen: EigenReport) -> str:
    """Eigenmode summary as delimited text: one row per conjugate pair."""
    lines = ["mode,damping_rate,angular_frequency,frequency_hz"]
    for i, (damping, omega) in enumerate(eigen.modes, start=1):
        freq = omega / (2.0 * math.pi)
        lines.append(f"{i},{_format_cell(damping)},{_format_cell(omega)},{_format_cell(freq)}")
    return "\n".join(lines) + "\n"


def write_eigen_csv(eigen: EigenReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(eigen_table(eigen))
