"""Bundled simulation scenarios: netlist text plus a matching run configuration.

Six scenarios ship with the package.  regime1 and regime2 are a pair of
dissipatively coupled LC resonators, identical except for the second
resonator's capacitance and the local loss; transmons couples two
junction-shunted qubits through a resistor; the pathological trio share
one resistor-plus-inductor coupling branch whose middle node carries no
capacitance and therefore triggers auxiliary regularization at run time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import ConfigError, RunConfig
from .constants import CONSTANTS, PhysicalConstants
from .netlist import format_value

PRESET_NAMES = (
    "regime1",
    "regime2",
    "transmons",
    "pathological-a",
    "pathological-c",
    "pathological-e",
)


@dataclass(frozen=True)
class TransmonParameters:
    """Element values realizing a transmon of given transition frequency.

    Solves f_ge = sqrt(8 E_J E_C)/h together with E_J = ratio * E_C, then
    converts the energies to circuit values: shunt capacitance from the
    charging energy, critical current and small-signal inductance from
    the Josephson energy.
    """

    f_ge: float
    ratio: float
    c_q: float  # shunt capacitance, F
    e_c: float  # charging energy e^2/2C_q, J
    e_j0: float  # Josephson energy, J
    i_c0: float  # critical current, A
    l_j: float  # small-signal junction inductance, H
    z_q: float  # sqrt(L_J/C_q), ohm


def transmon_parameters(
    f_ge: float, ratio: float, constants: PhysicalConstants = CONSTANTS
) -> TransmonParameters:
    if f_ge <= 0 or ratio <= 0:
        raise ValueError(f"f_ge and ratio must be positive, got {f_ge}, {ratio}")
    e_c = constants.h * f_ge / math.sqrt(8.0 * ratio)
    c_q = constants.e_charge**2 / (2.0 * e_c)
    e_j0 = ratio * e_c
    i_c0 = e_j0 * constants.k_J
    l_j = 1.0 / (i_c0 * constants.k_J)
    return TransmonParameters(
        f_ge=f_ge,
        ratio=ratio,
        c_q=c_q,
        e_c=e_c,
        e_j0=e_j0,
        i_c0=i_c0,
        l_j=l_j,
        z_q=math.sqrt(l_j / c_q),
    )


@dataclass(frozen=True)
class Preset:
    name: str
    netlist: str
    config: RunConfig


_RESONATOR_PAIR = """\
# two LC resonators with local loss, coupled by C12, L12 and R12
C C1 1 0 1.01p
L L1 1 0 1n
R R1 1 0 {r_local}
C C2 2 0 {c2}
L L2 2 0 1n
R R2 2 0 {r_local}
C C12 1 2 20.26f
L L12 1 2 10n
R R12 1 2 4k
"""

_PATHOLOGICAL = """\
# two LC resonators joined by a resistor in series with an inductor;
# the middle node carries no capacitance
C C1 1 0 1.01p
L L1 1 0 1n
R R12 1 2 {r12}
L L23 2 3 {l23}
C C3 3 0 1.01p
L L3 3 0 1n
"""

_TRANSMONS = """\
# two transmons (junction with capacitive shunt) coupled by a resistor
C Cq1 1 0 {c_q}
J J1 1 0 {i_c0}
C Cq2 2 0 {c_q}
J J2 2 0 {i_c0}
R R12 1 2 4k
"""

_SUPERPOSED = (complex(1.0), complex(1.0))  # (|0> + |1>)/sqrt(2)
_GROUND = (complex(1.0), complex(0.0))

# bare resonator period of the 1 nH / 1.01 pF oscillator, ~0.2 ns
_T_RES = 2.0 * math.pi * math.sqrt(1e-9 * 1.01e-12)


def preset(name: str) -> Preset:
    """Look up a bundled scenario by name; see PRESET_NAMES."""
    if name == "regime1":
        return Preset(
            name=name,
            netlist=_RESONATOR_PAIR.format(c2="1.01p", r_local="15.71M"),
            config=RunConfig(
                t_end=100.0 * _T_RES,
                dims=(3, 3),
                initial={1: _SUPERPOSED, 2: _GROUND},
            ),
        )
    if name == "regime2":
        return Preset(
            name=name,
            netlist=_RESONATOR_PAIR.format(c2="0.99p", r_local="0.1571M"),
            config=RunConfig(
                t_end=100.0 * _T_RES,
                dims=(3, 3),
                initial={1: _SUPERPOSED, 2: _GROUND},
            ),
        )
    if name == "transmons":
        pars = transmon_parameters(5e9, 50.0)
        return Preset(
            name=name,
            netlist=_TRANSMONS.format(
                c_q=format_value(pars.c_q), i_c0=format_value(pars.i_c0)
            ),
            config=RunConfig(
                t_end=20.0 / pars.f_ge,
                method="rk4-full",
                dims=(4, 4),
                initial={1: _SUPERPOSED, 2: (complex(0.2), complex(-0.8))},
            ),
        )
    if name in ("pathological-a", "pathological-c", "pathological-e"):
        variant = name[-1]
        netlist = _PATHOLOGICAL.format(
            r12="1k" if variant == "e" else "4k",
            l23="100n" if variant == "e" else "1n",
        )
        return Preset(
            name=name,
            netlist=netlist,
            config=RunConfig(
                t_end=500.0 * _T_RES if variant == "e" else 100.0 * _T_RES,
                method="linear-propagator",
                dims=(2, 2, 2),
                initial={
                    1: _SUPERPOSED,
                    3: (complex(0.2), complex(-0.8)) if variant == "e" else _GROUND,
                },
                aux_value=1.01e-12 if variant == "a" else 1.01e-15,
            ),
        )
    raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
