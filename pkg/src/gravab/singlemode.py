"""Closed-form dynamics of one graviton mode driven by the two arms and the source.

For a mode with frequency w and coupling rates g (rad/s), a branch whose
field sees the drive  beta = g_xi e^{i k.r_xi} + g_s e^{i k.r_s}  ends in the
coherent state  alpha = conj(beta) (1 - e^{-iwt}) / w  and picks up the phase
|beta|^2 (wt - sin wt) / w^2.  ``convention="mixed-sign"`` instead uses
(g_s e^{i k.r_s} + g_xi e^{-i k.r_xi}) (1 - e^{-iwt}) / w, with opposite
exponent signs on the two terms; ``convention="hamiltonian"`` is the one
generated by the Hamiltonian used in :mod:`gravab.fock_oracle`.  The two agree whenever k.r_s = 0 (mod pi)
and always agree on |alpha_u - alpha_d|.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .constants import CODATA2018, PhysicalConstants
from .errors import SingularModeError

__all__ = [
    "ModeParams",
    "CoherentAmplitude",
    "coupling_constant",
    "response_factor",
    "coherent_amplitude",
    "dynamical_phase",
    "overlap",
    "branch_distinguishability",
    "SERIES_THRESHOLD",
]

SERIES_THRESHOLD = 1e-6
CONVENTIONS = ("mixed-sign", "hamiltonian")


@dataclass(frozen=True, eq=False)
class ModeParams:
    k: np.ndarray
    omega: float
    polarization_factor: float = 1.0
    quantization_volume: float = 1.0

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        if k.shape != (3,):
            raise ValueError("k must be a 3-vector")
        k.setflags(write=False)
        object.__setattr__(self, "k", k)
        if self.quantization_volume <= 0 or self.polarization_factor <= 0:
            raise ValueError("quantization_volume and polarization_factor must be > 0")
        if self.omega < 0:
            raise ValueError("omega must be >= 0")

    @classmethod
    def from_wavevector(cls, k, constants=CODATA2018, **kw) -> "ModeParams":
        k = np.asarray(k, dtype=float)
        return cls(k=k, omega=constants.c * float(np.linalg.norm(k)), **kw)

    def check_dispersion(self, constants=CODATA2018, rtol=1e-12) -> bool:
        target = constants.c * float(np.linalg.norm(self.k))
        return abs(self.omega - target) <= rtol * max(abs(target), 1e-300)


@dataclass(frozen=True)
class CoherentAmplitude:
    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise ValueError(f"coherent amplitude must be finite, got {v!r}")
        object.__setattr__(self, "value", v)

    def __complex__(self):
        return self.value

    def __abs__(self):
        return abs(self.value)


def coupling_constant(mass: float, mode: ModeParams, constants: PhysicalConstants = CODATA2018) -> float:
    """Field coupling rate g = m c sqrt(2 pi G / (hbar w V)) sqrt(polarization_factor), in rad/s."""
    if mass < 0:
        raise ValueError("mass must be >= 0")
    if mode.omega == 0:
        raise SingularModeError("coupling diverges for a zero-frequency mode")
    return mass * constants.c * math.sqrt(
        2.0 * math.pi * constants.G * mode.polarization_factor
        / (constants.hbar * mode.omega * mode.quantization_volume)
    )


def response_factor(omega: float, t: float) -> complex:
    """(1 - e^{-i w t}) / w, continuous through w -> 0."""
    u = omega * t
    if abs(u) < SERIES_THRESHOLD:
        return t * complex(u / 2.0, 1.0 - u * u / 6.0)
    # 1 - e^{-iu} = 2 sin^2(u/2) + i sin u, free of cancellation
    return complex(2.0 * math.sin(0.5 * u) ** 2, math.sin(u)) / omega


def _phase(k, r):
    return cmath.exp(1j * float(np.dot(k, r)))


def coherent_amplitude(g_s, g_xi, mode: ModeParams, r_s, r_xi, t, convention="mixed-sign") -> CoherentAmplitude:
    """Field displacement left behind by one interferometer branch."""
    if t < 0:
        raise ValueError("t must be >= 0")
    es, ex = _phase(mode.k, r_s), _phase(mode.k, r_xi)
    if convention == "mixed-sign":
        drive = g_s * es + g_xi * ex.conjugate()
    elif convention == "hamiltonian":
        drive = (g_s * es + g_xi * ex).conjugate()
    else:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    return CoherentAmplitude(response_factor(mode.omega, t) * drive)


def _phase_time_factor(omega, t, time_factor):
    u = omega * t
    if time_factor == "linear":
        if omega == 0:
            raise SingularModeError("linear phase factor t/w diverges at w = 0")
        return t / omega
    if time_factor == "full":
        if abs(u) < 1e-3:
            # (u - sin u)/w^2 = t^2 (u/6 - u^3/120 + u^5/5040)
            return t * t * u * (1.0 / 6.0 - u * u / 120.0 + u**4 / 5040.0)
        return (u - math.sin(u)) / omega**2
    raise ValueError("time_factor must be 'full' or 'linear'")


def dynamical_phase(g_s, g_xi, mode: ModeParams, r_s, r_xi, t, time_factor="full") -> float:
    """Branch phase S * (wt - sin wt) / w^2 (``full``) or S t / w (``linear``).

    S = |g_s e^{i k.r_s} + g_xi e^{i k.r_xi}|^2.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    s = abs(g_s * _phase(mode.k, r_s) + g_xi * _phase(mode.k, r_xi)) ** 2
    return s * _phase_time_factor(mode.omega, t, time_factor)


def overlap(a, b) -> complex:
    """<a|b> for coherent states."""
    a, b = complex(a), complex(b)
    # -(|a|^2 + |b|^2)/2 + conj(a) b, rearranged so that a == b gives exactly 1
    return cmath.exp(complex(-0.5 * abs(a - b) ** 2, (a.conjugate() * b).imag))


def branch_distinguishability(g_u, g_d, mode: ModeParams, r_u, r_d, t, g_s=0.0, r_s=(0, 0, 0)) -> float:
    """|alpha_u - alpha_d|^2 for one mode; the source drive drops out."""
    a_u = coherent_amplitude(g_s, g_u, mode, r_s, r_u, t).value
    a_d = coherent_amplitude(g_s, g_d, mode, r_s, r_d, t).value
    return abs(a_u - a_d) ** 2
