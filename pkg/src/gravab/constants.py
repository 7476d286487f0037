"""Physical constants (CODATA 2018, SI) and Planck-scale quantities."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

__all__ = [
    "PhysicalConstants",
    "PlanckScale",
    "CODATA2018",
    "derive_planck_scale",
    "hbar_c_over_planck_energy",
    "QUOTED_CUTOFF_WAVENUMBER",
    "CUTOFF_PRESETS",
    "cutoff_wavenumber",
    "RB87_MASS",
    "QUOTED_ATOM_MASS",
    "QUOTED_PLANCK_MASS",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants in SI units.

    ``epsilon0`` is only consumed by the electromagnetic reference phases.
    """

    G: float = 6.67430e-11  # m^3 kg^-1 s^-2
    hbar: float = 1.054571817e-34  # J s
    c: float = 299792458.0  # m / s
    epsilon0: float = 8.8541878128e-12  # F / m

    def __post_init__(self):
        for name in ("G", "hbar", "c", "epsilon0"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and strictly positive, got {value!r}")

    @property
    def mu0(self) -> float:
        return 1.0 / (self.epsilon0 * self.c**2)

    def scaled(self, **factors: float) -> "PhysicalConstants":
        """Return a copy with named constants multiplied by the given factors."""
        return replace(self, **{k: getattr(self, k) * f for k, f in factors.items()})


CODATA2018 = PhysicalConstants()


@dataclass(frozen=True)
class PlanckScale:
    planck_mass: float  # kg
    planck_length: float  # m
    planck_wavenumber: float  # 1/m


def derive_planck_scale(constants: PhysicalConstants = CODATA2018) -> PlanckScale:
    G, hbar, c = constants.G, constants.hbar, constants.c
    length = math.sqrt(hbar * G / c**3)
    return PlanckScale(
        planck_mass=math.sqrt(hbar * c / G),
        planck_length=length,
        planck_wavenumber=math.sqrt(c**3 / (hbar * G)),
    )


def hbar_c_over_planck_energy(constants: PhysicalConstants = CODATA2018) -> float:
    """hbar*c/E_Planck taken literally. Dimensionally a length (equals l_p)."""
    scale = derive_planck_scale(constants)
    return constants.hbar * constants.c / (scale.planck_mass * constants.c**2)


# Order-of-magnitude cutoff quoted alongside the entropy estimate.
QUOTED_CUTOFF_WAVENUMBER = 1e32  # 1/m

CUTOFF_PRESETS = ("codata", "paper-cutoff")


def cutoff_wavenumber(preset: str = "codata", constants: PhysicalConstants = CODATA2018) -> float:
    if preset == "codata":
        return derive_planck_scale(constants).planck_wavenumber
    if preset == "paper-cutoff":
        return QUOTED_CUTOFF_WAVENUMBER
    raise ValueError(f"unknown cutoff preset {preset!r}; expected one of {CUTOFF_PRESETS}")


RB87_MASS = 1.443160648e-25  # kg, 86.909180531 u
QUOTED_ATOM_MASS = 16e-27  # kg, value used in the quoted Rubidium estimate
QUOTED_PLANCK_MASS = 2.2e-8  # kg, rounded value used in the quoted estimate
