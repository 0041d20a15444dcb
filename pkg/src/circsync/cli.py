"""Command-line interface.

Subcommands:
    run        integrate a netlist + config scenario, write traces
    preset     run one of the bundled scenarios by name
    classical  same pipeline with the c-number integrator
    eigen      linear eigenmode analysis only, no integration

Exit codes: 0 success, 1 input error, 2 numerical failure.  Warnings
(auxiliary insertion, skipped analyses) go to stderr prefixed "WARN:".
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .eom import build_system, eigenfrequencies
from .netlist import CircuitSpec, NetlistError, parse_netlist, parse_value, render_netlist
from .presets import PRESET_NAMES, preset
from .report import eigen_table, write_csv, write_eigen_csv, write_svg
from .runner import run_scenario
from .topology import assemble_matrices, detect_singular_capacitance, insert_auxiliary_capacitor


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circsync",
        description="Simulate synchronization of lossy superconducting circuits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--netlist", help="netlist file to simulate")
    common.add_argument("--config", help="run configuration file")
    common.add_argument("--out", default=".", help="output directory (default: current)")
    common.add_argument(
        "--format", choices=("csv", "svg", "both"), default="csv", help="output file kinds"
    )
    common.add_argument("--t-end", dest="t_end", help="override end time, e.g. 20n")
    common.add_argument("--dt", help="override time step, a number or 'auto'")
    common.add_argument(
        "--method",
        choices=("auto", "rk4-full", "linear-propagator", "classical"),
        help="override integration method",
    )
    common.add_argument(
        "--sweep",
        metavar="KEY=START:STOP:N",
        help="sweep an element value (by name) or t_end/dt over a linear grid",
    )

    run_p = sub.add_parser("run", parents=[common], help="integrate a scenario")
    run_p.add_argument("--preset", help=f"bundled scenario: {', '.join(PRESET_NAMES)}")
    run_p.set_defaults(func=_cmd_run, force_method=None)

    classical_p = sub.add_parser(
        "classical", parents=[common], help="integrate with the c-number equations"
    )
    classical_p.add_argument("--preset", help=f"bundled scenario: {', '.join(PRESET_NAMES)}")
    classical_p.set_defaults(func=_cmd_run, force_method="classical")

    preset_p = sub.add_parser("preset", parents=[common], help="run a bundled scenario")
    preset_p.add_argument("name", help=f"one of: {', '.join(PRESET_NAMES)}")
    preset_p.set_defaults(func=_cmd_preset, force_method=None)

    eigen_p = sub.add_parser("eigen", parents=[common], help="eigenmode analysis only")
    eigen_p.add_argument("--preset", help=f"bundled scenario: {', '.join(PRESET_NAMES)}")
    eigen_p.set_defaults(func=_cmd_eigen)

    return parser


def _load_inputs(args) -> tuple[str, RunConfig | None, str]:
    """Resolve (netlist text, base config or None, label) from the flags."""
    preset_name = getattr(args, "preset", None)
    if preset_name and args.netlist:
        raise ConfigError("give either --netlist or --preset, not both")
    if preset_name:
        p = preset(preset_name)
        netlist_text, config, label = p.netlist, p.config, p.name
    elif args.netlist:
        netlist_text = Path(args.netlist).read_text(encoding="utf-8")
        config, label = None, Path(args.netlist).stem
    else:
        raise ConfigError("a netlist source is required: --netlist or --preset")
    if args.config:
        config = load_config(args.config)
    return netlist_text, config, label


def _apply_overrides(args, config: RunConfig | None) -> RunConfig:
    overrides: dict = {}
    if args.t_end:
        overrides["t_end"] = parse_value(args.t_end)
    if args.dt:
        overrides["dt"] = "auto" if args.dt == "auto" else parse_value(args.dt)
    if args.method:
        overrides["method"] = args.method
    if args.force_method:
        overrides["method"] = args.force_method
    if config is None:
        if "t_end" not in overrides:
            raise ConfigError("need --config or --t-end to set the simulation length")
        return RunConfig(**overrides)
    return config.override(**overrides) if overrides else config


def _parse_sweep(text: str) -> tuple[str, np.ndarray]:
    key, eq, grid = text.partition("=")
    parts = grid.split(":")
    if not eq or len(parts) != 3 or not key:
        raise ConfigError(f"bad sweep {text!r}; expected key=start:stop:n")
    try:
        start, stop = parse_value(parts[0]), parse_value(parts[1])
        count = int(parts[2])
    except (NetlistError, ValueError) as err:
        raise ConfigError(f"bad sweep {text!r}: {err}") from None
    if count < 2:
        raise ConfigError(f"sweep needs at least 2 points, got {count}")
    return key.strip(), np.linspace(start, stop, count)


def _sweep_point(netlist_text: str, config: RunConfig, key: str, value: float):
    if key in ("t_end", "dt"):
        return netlist_text, config.override(**{key: float(value)})
    spec = parse_netlist(netlist_text)
    if not any(e.name == key for e in spec.elements):
        raise ConfigError(f"sweep key {key!r} is neither an element name nor t_end/dt")
    elements = tuple(
        dataclasses.replace(e, value=float(value)) if e.name == key else e
        for e in spec.elements
    )
    return render_netlist(CircuitSpec(elements)), config


def _plot_pair(series) -> tuple[int, int] | None:
    aux_text = str(series.metadata.get("auxiliary_nodes", ""))
    aux = {int(tok) for tok in aux_text.split(",") if tok}
    non_aux = [k for k in range(1, series.n_dof + 1) if k not in aux]
    if len(non_aux) >= 2:
        return non_aux[0], non_aux[1]
    return None


def _write_outputs(series, out_dir: str, base: str, fmt: str) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("csv", "both"):
        path = out / f"{base}.csv"
        write_csv(series, path)
        written.append(path)
    if fmt in ("svg", "both"):
        pair = _plot_pair(series)
        if pair is None:
            warnings.warn("fewer than two non-auxiliary DOFs, skipping plot", stacklevel=2)
        else:
            path = out / f"{base}.svg"
            write_svg(series, pair, path)
            written.append(path)
    return written


def _print_summary(series, report, eigen) -> None:
    meta = series.metadata
    print(
        f"method: {meta.get('method', '?')}  dt: {meta.get('dt', '?')} s  "
        f"samples: {series.times.size}"
    )
    if report is not None:
        print(
            f"sync: strict={report.strict_sync}  transient={report.transient_time:.4g} s  "
            f"phase_lag={report.phase_lag:.4g} rad  amplitude_ratio={report.amplitude_ratio:.4g}  "
            f"decay_rate={report.decay_rate:.4g} 1/s"
        )
    parts = [
        f"f={omega / (2.0 * np.pi):.4g} Hz damping={damping:.4g} 1/s"
        for damping, omega in eigen.modes
    ]
    if parts:
        print("modes: " + "; ".join(parts))


def _run_one(netlist_text: str, config: RunConfig, label: str, args) -> int:
    series, report, eigen = run_scenario(netlist_text, config, label=label)
    written = _write_outputs(series, args.out, label, args.format)
    for path in written:
        print(f"wrote {path}")
    _print_summary(series, report, eigen)
    return 0


def _run_sweep(netlist_text: str, config: RunConfig, label: str, args) -> int:
    key, values = _parse_sweep(args.sweep)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    points = []
    for value in values:
        value = float(value)
        points.append((value, *_sweep_point(netlist_text, config, key, value)))

    def compute(point):
        value, nt, cfg = point
        series, report, _ = run_scenario(nt, cfg, label=f"{label} {key}={value:g}")
        return series, report

    # points are independent; integrate them concurrently but keep every
    # file write and the summary merge on this thread, in index order
    workers = min(len(points), os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(compute, points))

    rows = ["index,key,value,strict_sync,transient_time,phase_lag,amplitude_ratio,decay_rate"]
    for idx, ((value, _, _), (series, report)) in enumerate(zip(points, results)):
        _write_outputs(series, args.out, f"{label}_sweep{idx}", args.format)
        if report is None:
            rows.append(f"{idx},{key},{value!r},,,,,")
        else:
            rows.append(
                f"{idx},{key},{value!r},{report.strict_sync},{report.transient_time!r},"
                f"{report.phase_lag!r},{report.amplitude_ratio!r},{report.decay_rate!r}"
            )
    path = out / f"{label}_sweep.csv"
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    print(f"wrote {path}")
    print(f"swept {key} over {len(values)} points")
    return 0


def _cmd_run(args) -> int:
    netlist_text, config, label = _load_inputs(args)
    config = _apply_overrides(args, config)
    if args.sweep:
        return _run_sweep(netlist_text, config, label, args)
    return _run_one(netlist_text, config, label, args)


def _cmd_preset(args) -> int:
    args.preset = args.name
    args.netlist = None
    return _cmd_run(args)


def _cmd_eigen(args) -> int:
    netlist_text, config, label = _load_inputs(args)
    spec = parse_netlist(netlist_text)
    model = assemble_matrices(spec)
    for node in detect_singular_capacitance(model):
        spec = insert_auxiliary_capacitor(spec, node, config.aux_value if config else None)
        warnings.warn(f"node {node} has no capacitance; inserted auxiliary capacitor", stacklevel=2)
        model = assemble_matrices(spec)
    k_j = config.k_j if config and config.k_j is not None else None
    sys_ = build_system(model) if k_j is None else build_system(model, k_J=k_j)
    eigen = eigenfrequencies(sys_)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{label}_eigen.csv"
    write_eigen_csv(eigen, path)
    print(f"wrote {path}")
    print(eigen_table(eigen), end="")
    return 0


def _classify(err: Exception) -> int:
    if isinstance(err, (FloatingPointError, np.linalg.LinAlgError, OverflowError)):
        return 2
    if isinstance(err, ValueError) and str(err).startswith("integrate:"):
        return 2
    return 1


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"WARN: {message}", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        warnings.showwarning = _show_warning
        try:
            return args.func(args)
        except (NetlistError, ConfigError, OSError, ValueError, ArithmeticError) as err:
            print(f"error: {err}", file=sys.stderr)
            return _classify(err)


if __name__ == "__main__":
    sys.exit(main())
