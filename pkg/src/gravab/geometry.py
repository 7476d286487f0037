"""Interferometer configuration and light-cone gating of the two arms."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .constants import CODATA2018, PhysicalConstants, RB87_MASS
from .errors import ConfigError, GeometryError, ScenarioInconsistencyError

__all__ = [
    "InterferometerGeometry",
    "ScenarioKind",
    "ScenarioConfig",
    "GatingReport",
    "arm_distances",
    "causal_gating",
    "overstreet_preset",
]


def _vec3(value, name):
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise ConfigError(f"{name} must be a finite 3-vector, got {value!r}")
    arr.setflags(write=False)
    return arr


def _dist(a, b) -> float:
    # hypot rescales internally, so tiny separations do not underflow to zero
    return math.hypot(*(a - b))


@dataclass(frozen=True, eq=False)
class InterferometerGeometry:
    """Static arm positions, source position, masses and interaction time (SI)."""

    r_u: np.ndarray
    r_d: np.ndarray
    r_s: np.ndarray
    atom_mass: float
    source_mass: float
    interaction_time: float

    def __post_init__(self):
        for name in ("r_u", "r_d", "r_s"):
            object.__setattr__(self, name, _vec3(getattr(self, name), name))
        if not (self.atom_mass > 0 and math.isfinite(self.atom_mass)):
            raise ConfigError(f"atom_mass must be > 0, got {self.atom_mass!r}")
        if not (self.source_mass > 0 and math.isfinite(self.source_mass)):
            raise ConfigError(f"source_mass must be > 0, got {self.source_mass!r}")
        if not (self.interaction_time >= 0 and math.isfinite(self.interaction_time)):
            raise ConfigError(f"interaction_time must be >= 0, got {self.interaction_time!r}")
        for arm in ("r_u", "r_d"):
            if not _dist(getattr(self, arm), self.r_s) > 0:
                raise GeometryError(f"{arm} coincides with the source position")

    def __eq__(self, other):
        if not isinstance(other, InterferometerGeometry):
            return NotImplemented
        return (
            np.array_equal(self.r_u, other.r_u)
            and np.array_equal(self.r_d, other.r_d)
            and np.array_equal(self.r_s, other.r_s)
            and self.atom_mass == other.atom_mass
            and self.source_mass == other.source_mass
            and self.interaction_time == other.interaction_time
        )

    @property
    def separation(self) -> float:
        """Arm separation |r_u - r_d|."""
        return _dist(self.r_u, self.r_d)

    def swapped(self) -> "InterferometerGeometry":
        """Same configuration with the arm labels exchanged."""
        return self.replace(r_u=self.r_d, r_d=self.r_u)

    def replace(self, **changes) -> "InterferometerGeometry":
        kwargs = dict(
            r_u=self.r_u, r_d=self.r_d, r_s=self.r_s, atom_mass=self.atom_mass,
            source_mass=self.source_mass, interaction_time=self.interaction_time,
        )
        kwargs.update(changes)
        return InterferometerGeometry(**kwargs)

    def transformed(self, rotation=None, shift=None) -> "InterferometerGeometry":
        """Apply x -> R x + shift to all three positions."""
        R = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
        b = np.zeros(3) if shift is None else np.asarray(shift, dtype=float)
        return self.replace(r_u=R @ self.r_u + b, r_d=R @ self.r_d + b, r_s=R @ self.r_s + b)


class ScenarioKind(str, enum.Enum):
    FULL = "full-interaction"
    ONE_ARM = "one-arm"
    NO_ARM = "no-arm"


@dataclass(frozen=True)
class ScenarioConfig:
    kind: ScenarioKind = ScenarioKind.FULL
    loop_closure_time: float = 0.0

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", ScenarioKind(self.kind))
        except ValueError:
            choices = ", ".join(k.value for k in ScenarioKind)
            raise ConfigError(f"unknown scenario kind {self.kind!r}; expected one of {choices}") from None
        if not (self.loop_closure_time >= 0 and math.isfinite(self.loop_closure_time)):
            raise ConfigError(f"loop_closure_time must be >= 0, got {self.loop_closure_time!r}")


@dataclass(frozen=True)
class GatingReport:
    arm_u_in_contact: bool
    arm_d_in_contact: bool
    light_travel_u: float
    light_travel_d: float
    notes: tuple = field(default=())

    @property
    def gates(self) -> tuple[float, float]:
        """Coupling multipliers (u, d): 1 for an arm in contact, 0 otherwise."""
        return float(self.arm_u_in_contact), float(self.arm_d_in_contact)


def arm_distances(geom: InterferometerGeometry) -> tuple[float, float]:
    d_u = _dist(geom.r_u, geom.r_s)
    d_d = _dist(geom.r_d, geom.r_s)
    if d_u <= 0 or d_d <= 0:
        raise GeometryError("arm-source distance must be strictly positive")
    return d_u, d_d


def causal_gating(
    geom: InterferometerGeometry,
    scenario: ScenarioConfig,
    constants: PhysicalConstants = CODATA2018,
) -> GatingReport:
    """Decide which arms exchange gravitons with the source before loop closure.

    An arm is in contact when the light-travel time from the source is no
    longer than the loop-closure time. ``full-interaction`` forces both arms
    on. ``one-arm`` and ``no-arm`` are checked against the light cone and
    raise :class:`ScenarioInconsistencyError` when the timing disagrees.
    """
    d_u, d_d = arm_distances(geom)
    t_u, t_d = d_u / constants.c, d_d / constants.c
    tc = scenario.loop_closure_time
    in_u, in_d = t_u <= tc, t_d <= tc
    kind = scenario.kind

    if kind is ScenarioKind.FULL:
        return GatingReport(True, True, t_u, t_d, ("both arms forced into contact",))

    if kind is ScenarioKind.NO_ARM:
        if in_u or in_d:
            raise ScenarioInconsistencyError(
                f"no-arm requires loop_closure_time < min(light_travel) "
                f"but {tc!r} >= {min(t_u, t_d)!r} s"
            )
        return GatingReport(False, False, t_u, t_d, ("loop closed before any graviton exchange",))

    # one-arm
    if in_u and in_d:
        raise ScenarioInconsistencyError(
            f"one-arm requires loop_closure_time < max(light_travel) "
            f"but {tc!r} >= {max(t_u, t_d)!r} s (both arms causally connected)"
        )
    if not (in_u or in_d):
        raise ScenarioInconsistencyError(
            f"one-arm requires loop_closure_time >= min(light_travel) "
            f"but {tc!r} < {min(t_u, t_d)!r} s (neither arm causally connected)"
        )
    near = "u" if in_u else "d"
    return GatingReport(in_u, in_d, t_u, t_d, (f"only arm {near} exchanges gravitons",))


def light_cone_flags(geom, loop_closure_time, constants=CODATA2018):
    """Raw light-cone contact flags (u, d) with no scenario consistency checks."""
    d_u, d_d = arm_distances(geom)
    return d_u / constants.c <= loop_closure_time, d_d / constants.c <= loop_closure_time


def overstreet_preset() -> InterferometerGeometry:
    """Illustrative geometry loosely modelled on a 1250 kg source-mass experiment.

    The arm distances and interaction time are placeholders chosen for
    demonstration, not measured values. Atom is Rb-87.
    """
    return InterferometerGeometry(
        r_u=(0.0, 0.0, 0.35),
        r_d=(0.0, 0.0, 0.10),
        r_s=(0.0, 0.0, 0.0),
        atom_mass=RB87_MASS,
        source_mass=1250.0,
        interaction_time=1.0,
    )
