"""Classical and semiclassical reference phases.

Gravitational: action phase with gradient corrections and the pure
potential-difference phase for a Newtonian point source V = -G M / |x - r_s|,
evaluated on static arm positions.  Electromagnetic: flux phase of an ideal
solenoid and the local phase integral over a finite solenoid current shell.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import _kernels
from .constants import CODATA2018, PhysicalConstants
from .errors import ConfigError, NumericalError, SingularIntegrandError
from .geometry import InterferometerGeometry

__all__ = [
    "PotentialModel",
    "SolenoidModel",
    "action_phase",
    "ab_phase_semiclassical",
    "gradient_residual_ratio",
    "optimal_source_distance",
    "em_flux_phase",
    "em_local_ab_phase",
]


@dataclass(frozen=True, eq=False)
class PotentialModel:
    source_mass: float
    source_position: np.ndarray
    G: float = CODATA2018.G
    kind: str = "newtonian-point-source"

    def __post_init__(self):
        object.__setattr__(self, "source_position", np.asarray(self.source_position, dtype=float))
        if self.kind != "newtonian-point-source":
            raise ConfigError(f"unsupported potential kind {self.kind!r}")
        if self.source_mass <= 0:
            raise ConfigError("source_mass must be > 0")

    @classmethod
    def point_source(cls, geom: InterferometerGeometry, constants=CODATA2018):
        return cls(geom.source_mass, geom.r_s, constants.G)

    def value(self, x) -> float:
        return -self.G * self.source_mass / float(np.linalg.norm(np.asarray(x, dtype=float) - self.source_position))

    def gradient(self, x) -> np.ndarray:
        rel = np.asarray(x, dtype=float) - self.source_position
        return self.G * self.source_mass * rel / float(np.linalg.norm(rel)) ** 3


def _arm_direction(geom):
    sep = geom.r_u - geom.r_d
    dx = float(np.linalg.norm(sep))
    return (sep / dx if dx > 0 else np.zeros(3)), dx


def action_phase(geom: InterferometerGeometry, potential: PotentialModel,
                 constants: PhysicalConstants = CODATA2018, gates=(1.0, 1.0)) -> float:
    """(m/hbar) t ([V_u - V_d] - (dx/2)[dV/dn(u) + dV/dn(d)]), n the unit vector from r_d to r_u."""
    n, dx = _arm_direction(geom)
    c_u, c_d = gates
    v = c_u * potential.value(geom.r_u) - c_d * potential.value(geom.r_d)
    grad = c_u * float(n @ potential.gradient(geom.r_u)) + c_d * float(n @ potential.gradient(geom.r_d))
    return geom.atom_mass * geom.interaction_time / constants.hbar * (v - 0.5 * dx * grad)


def ab_phase_semiclassical(geom: InterferometerGeometry, potential: PotentialModel,
                           constants: PhysicalConstants = CODATA2018, gates=(1.0, 1.0)) -> float:
    """(m/hbar) t [V(r_u) - V(r_d)]."""
    v = gates[0] * potential.value(geom.r_u) - gates[1] * potential.value(geom.r_d)
    return geom.atom_mass * geom.interaction_time / constants.hbar * v


def gradient_residual_ratio(geom, potential, constants=CODATA2018) -> float:
    """|action_phase| / |ab_phase_semiclassical|: how much the gradient terms leave over."""
    return abs(action_phase(geom, potential, constants)) / abs(ab_phase_semiclassical(geom, potential, constants))


def optimal_source_distance(separation, atom_mass, source_mass, t=1.0, residual=0.01,
                            constants=CODATA2018, bracket=(1e-6, 1e6)) -> float:
    """Distance from the source to the near arm at which the gradient residual equals ``residual``.

    Collinear layout: source at the origin, arms at d and d + separation on
    the z axis.  Farther placements leave a smaller residual.
    """

    def f(log_d):
        d = math.exp(log_d)
        geom = InterferometerGeometry(
            r_u=(0.0, 0.0, d + separation), r_d=(0.0, 0.0, d), r_s=(0.0, 0.0, 0.0),
            atom_mass=atom_mass, source_mass=source_mass, interaction_time=t,
        )
        pot = PotentialModel.point_source(geom, constants)
        return gradient_residual_ratio(geom, pot, constants) - residual

    lo, hi = (math.log(b * separation) for b in bracket)
    return math.exp(optimize.brentq(f, lo, hi, xtol=1e-14, rtol=1e-14))


# ----------------------------------------------------------------- electromagnetic

@dataclass(frozen=True, eq=False)
class SolenoidModel:
    """Finite cylindrical current shell with azimuthal current density.

    The shell occupies radius..radius+thickness, |z| <= length/2 along ``axis``
    about ``center``.
    """

    radius: float
    current_density: float  # A / m^2, azimuthal
    length: float
    thickness: float
    axis: np.ndarray = (0.0, 0.0, 1.0)
    center: np.ndarray = (0.0, 0.0, 0.0)

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=float)
        norm = float(np.linalg.norm(axis))
        if norm == 0:
            raise ConfigError("solenoid axis must be nonzero")
        object.__setattr__(self, "axis", axis / norm)
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if min(self.radius, self.length, self.thickness) <= 0:
            raise ConfigError("radius, length and thickness must be > 0")

    @property
    def surface_current(self) -> float:
        return self.current_density * self.thickness

    def flux(self, constants=CODATA2018) -> float:
        """Flux of the infinite-length field: mu0 j [w pi a^2 + 2 pi int_a^b (b - rho) rho d rho]."""
        a, b = self.radius, self.radius + self.thickness
        shell = b * (b * b - a * a) / 2.0 - (b**3 - a**3) / 3.0
        return constants.mu0 * self.current_density * (self.thickness * math.pi * a * a + 2.0 * math.pi * shell)

    def ideal_flux(self, constants=CODATA2018) -> float:
        """Thin-shell limit mu0 K pi a^2."""
        return constants.mu0 * self.surface_current * math.pi * self.radius**2

    def frame(self):
        e3 = self.axis
        trial = np.array([1.0, 0.0, 0.0]) if abs(e3[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        e1 = trial - (trial @ e3) * e3
        e1 /= np.linalg.norm(e1)
        return np.vstack([e1, np.cross(e3, e1), e3])


def em_flux_phase(q: float, solenoid: SolenoidModel, constants: PhysicalConstants = CODATA2018) -> float:
    """q * Phi / hbar for one loop around the solenoid."""
    return q * solenoid.flux(constants) / constants.hbar


def em_local_ab_phase(q, p, particle_mass, t, r_c, solenoid: SolenoidModel,
                      constants: PhysicalConstants = CODATA2018, rel_tol=1e-8, max_nodes=4_000_000) -> float:
    """(2 t q / (m hbar eps0 c^2)) int p . j(x) / |r_c - x| d^3x over the solenoid shell.

    Gauss-Legendre in radius and height, periodic trapezoid in azimuth; the
    orders double until successive estimates agree to ``rel_tol``.
    """
    R = solenoid.frame()
    rc = R @ (np.asarray(r_c, dtype=float) - solenoid.center)
    pl = R @ np.asarray(p, dtype=float)
    # rotation round-off on an axial momentum
    pl[:2][np.abs(pl[:2]) <= 4 * np.finfo(float).eps * float(np.linalg.norm(pl))] = 0.0
    rho_c = math.hypot(rc[0], rc[1])
    a, b = solenoid.radius, solenoid.radius + solenoid.thickness
    if a <= rho_c <= b and abs(rc[2]) <= 0.5 * solenoid.length:
        raise SingularIntegrandError("particle position lies inside the solenoid current shell")
    prefactor = 2.0 * t * q / (particle_mass * constants.hbar * constants.epsilon0 * constants.c**2)
    if prefactor == 0.0 or not np.any(pl[:2]):
        return 0.0

    n_rho, n_phi, n_z = 4, 32, 16
    previous = None
    while n_rho * n_phi * n_z <= max_nodes:
        rx, rw = np.polynomial.legendre.leggauss(n_rho)
        zx, zw = np.polynomial.legendre.leggauss(n_z)
        value = _kernels.shell_sum(rc, pl, a, solenoid.thickness, solenoid.length, rx, rw, zx, zw, n_phi)
        if previous is not None and abs(value - previous) <= rel_tol * abs(value):
            return prefactor * solenoid.current_density * value
        previous = value
        n_rho, n_phi, n_z = n_rho * 2, n_phi * 2, n_z * 2
    raise NumericalError("solenoid quadrature did not converge; particle may be too close to the shell")
