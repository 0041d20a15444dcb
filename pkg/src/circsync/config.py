"""Run configuration: in-memory dataclass and the key=value file format.

Config files are sectioned key=value text::

    [sim]
    t_end = 20n
    dt = auto
    method = linear-propagator

    [quantum]
    dims = 3,3

    [initial.1]
    alpha = 1,0
    beta = 1,0

    [tolerances]
    phase_tol = 0.05

Scalar values take the same engineering suffixes as netlist values.
Complex values are written as `re,im` pairs (a bare real is accepted).
Unknown sections or keys are errors; only [sim] with t_end is required.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .analysis import SyncTolerances
from .netlist import NetlistError, parse_value

METHODS = ("auto", "rk4-full", "linear-propagator", "classical")


class ConfigError(ValueError):
    """Raised for malformed or inconsistent run configuration."""


@dataclass(frozen=True)
class RunConfig:
    t_end: float
    dt: float | str = "auto"
    method: str = "auto"
    dims: tuple[int, ...] | None = None  # None: per-DOF defaults
    initial: dict[int, tuple[complex, complex]] = field(default_factory=dict)
    k_j: float | None = None  # None: physical 2 pi / flux quantum
    tolerances: SyncTolerances = field(default_factory=SyncTolerances)
    aux_value: float | None = None  # None: smallest capacitance / 100
    out_dir: str | None = None

    def __post_init__(self):
        if self.t_end <= 0:
            raise ConfigError(f"t_end must be positive, got {self.t_end}")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.dt != "auto" and (not isinstance(self.dt, float) or self.dt <= 0):
            raise ConfigError(f"dt must be 'auto' or a positive number, got {self.dt!r}")
        if self.dims is not None and any(d < 2 for d in self.dims):
            raise ConfigError(f"every Fock dimension must be >= 2, got {self.dims}")

    def override(self, **kwargs) -> "RunConfig":
        return replace(self, **kwargs)


def parse_complex(text: str) -> complex:
    """Parse `re,im` (or a bare real) into a complex number."""
    parts = [p.strip() for p in text.split(",")]
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ConfigError(f"bad complex value {text!r}; expected re,im")


def _positive(text: str, key: str) -> float:
    try:
        return parse_value(text)
    except NetlistError as err:
        raise ConfigError(f"{key}: {err}") from None


_SIM_KEYS = ("t_end", "dt", "method", "out")
_QUANTUM_KEYS = ("dims", "k_j", "aux_value")
_TOL_KEYS = ("phase_tol", "amp_tol", "consecutive_periods")
_INITIAL_KEYS = ("alpha", "beta")


def parse_config(text: str) -> RunConfig:
    """Parse config text; see the module docstring for the format."""
    sections: dict[str, dict[str, str]] = {}
    current: dict[str, str] | None = None
    current_name = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current_name = line[1:-1].strip()
            if current_name in sections:
                raise ConfigError(f"line {lineno}: duplicate section [{current_name}]")
            current = sections.setdefault(current_name, {})
            continue
        if current is None:
            raise ConfigError(f"line {lineno}: key outside any section")
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in current:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} in [{current_name}]")
        current[key] = value

    known = {"sim", "quantum", "tolerances"}
    for name in sections:
        if name in known:
            continue
        if name.startswith("initial."):
            try:
                dof = int(name.split(".", 1)[1])
            except ValueError:
                dof = 0
            if dof >= 1:
                continue
        raise ConfigError(f"unknown section [{name}]")

    if "sim" not in sections or "t_end" not in sections["sim"]:
        raise ConfigError("missing required section [sim] with t_end")

    sim = sections["sim"]
    for key in sim:
        if key not in _SIM_KEYS:
            raise ConfigError(f"unknown key {key!r} in [sim]")
    kwargs: dict = {"t_end": _positive(sim["t_end"], "t_end")}
    if "dt" in sim:
        kwargs["dt"] = "auto" if sim["dt"] == "auto" else _positive(sim["dt"], "dt")
    if "method" in sim:
        kwargs["method"] = sim["method"]
    if "out" in sim:
        kwargs["out_dir"] = sim["out"]

    quantum = sections.get("quantum", {})
    for key in quantum:
        if key not in _QUANTUM_KEYS:
            raise ConfigError(f"unknown key {key!r} in [quantum]")
    if "dims" in quantum:
        try:
            kwargs["dims"] = tuple(int(d) for d in quantum["dims"].split(","))
        except ValueError:
            raise ConfigError(f"bad dims {quantum['dims']!r}; expected e.g. 3,3") from None
    if "k_j" in quantum:
        kwargs["k_j"] = _positive(quantum["k_j"], "k_j")
    if "aux_value" in quantum:
        kwargs["aux_value"] = _positive(quantum["aux_value"], "aux_value")

    initial: dict[int, tuple[complex, complex]] = {}
    for name, body in sections.items():
        if not name.startswith("initial."):
            continue
        dof = int(name.split(".", 1)[1])
        for key in body:
            if key not in _INITIAL_KEYS:
                raise ConfigError(f"unknown key {key!r} in [{name}]")
        alpha = parse_complex(body["alpha"]) if "alpha" in body else complex(1.0)
        beta = parse_complex(body["beta"]) if "beta" in body else complex(0.0)
        initial[dof] = (alpha, beta)
    if initial:
        kwargs["initial"] = initial

    tols = sections.get("tolerances", {})
    for key in tols:
        if key not in _TOL_KEYS:
            raise ConfigError(f"unknown key {key!r} in [tolerances]")
    if tols:
        kwargs["tolerances"] = SyncTolerances(
            phase_tol=float(tols.get("phase_tol", 0.05)),
            amp_tol=float(tols.get("amp_tol", 0.05)),
            consecutive_periods=int(tols.get("consecutive_periods", 5)),
        )

    return RunConfig(**kwargs)


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as handle:
        return parse_config(handle.read())
