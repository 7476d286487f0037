"""Quantum-field model of the gravitational Aharonov-Bohm phase.

Single-mode closed forms, a truncated Fock-space reference, mode-continuum
phase and entanglement integrals, and semiclassical cross-checks.
"""

__version__ = "0.1.0"

from .constants import CODATA2018, PhysicalConstants, PlanckScale, derive_planck_scale  # noqa: E402
from .geometry import (  # noqa: E402
    GatingReport,
    InterferometerGeometry,
    ScenarioConfig,
    ScenarioKind,
    arm_distances,
    causal_gating,
    overstreet_preset,
)
from .singlemode import (  # noqa: E402
    CoherentAmplitude,
    ModeParams,
    coherent_amplitude,
    coupling_constant,
    dynamical_phase,
    overlap,
)
from .continuum import (  # noqa: E402
    ModeIntegralSpec,
    PhaseEntropyReport,
    ab_phase_closed_form,
    ab_phase_numeric,
    entropy_integral,
    linear_entropy_continuum,
    phase_entropy_report,
    visibility,
)
from .semiclassical import (  # noqa: E402
    PotentialModel,
    SolenoidModel,
    ab_phase_semiclassical,
    action_phase,
    em_flux_phase,
    em_local_ab_phase,
)
