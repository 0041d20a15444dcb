"""Physical constants (exact SI definitions)."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.054571817e-34
    h: float = 6.62607015e-34
    e_charge: float = 1.602176634e-19
    flux_quantum: float = field(init=False)
    k_J: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "flux_quantum", self.h / (2.0 * self.e_charge))
        object.__setattr__(self, "k_J", 2.0 * pi / self.flux_quantum)


CONSTANTS = PhysicalConstants()
