"""Mode-continuum observables: AB phase, entanglement integral, visibility.

Mode sums become k-space integrals with a density-of-states factor
(``standard``: V/(2 pi)^3, ``bare-volume``: V).  The angular part is done
analytically, leaving radial integrals in x = k r that are split at
``split_point``: adaptive quadrature below, exact sine/cosine-integral
closed forms above.  Every prefactor is assembled from
:func:`gravab.singlemode.coupling_constant`, so the quantization volume
cancels numerically rather than by construction.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy import integrate, special

from .constants import (
    CODATA2018,
    QUOTED_ATOM_MASS,
    QUOTED_PLANCK_MASS,
    RB87_MASS,
    PhysicalConstants,
    cutoff_wavenumber,
    derive_planck_scale,
)
from .errors import ConfigError, CutoffTooSmallError, NumericalError
from .geometry import InterferometerGeometry, arm_distances
from .singlemode import ModeParams, coupling_constant

__all__ = [
    "ModeIntegralSpec",
    "EntropyIntegral",
    "EntropyResult",
    "PhaseEntropyReport",
    "EULER_GAMMA",
    "MIN_CUTOFF_PRODUCT",
    "entropy_kernel_closed",
    "entropy_kernel_numeric",
    "time_kernel_closed",
    "time_kernel_numeric",
    "ab_phase_closed_form",
    "ab_phase_numeric",
    "entropy_integral",
    "gated_entropy_integral",
    "linear_entropy_continuum",
    "visibility",
    "phase_entropy_report",
    "quoted_reproduction",
]

EULER_GAMMA = float(np.euler_gamma)
MIN_CUTOFF_PRODUCT = 1e3
DENSITY_CONVENTIONS = ("standard", "bare-volume")
TIME_FACTORS = ("unity", "exact")


@dataclass(frozen=True)
class ModeIntegralSpec:
    """Integration settings for mode-continuum observables.

    ``k_max=None`` resolves to the Planck wavenumber of the constants in use.
    ``time_factor`` selects how the (1 - cos w t) weight in the entanglement
    integral is treated; the phase integral always uses the linear-in-t form.
    """

    k_max: float | None = None
    k_min: float = 0.0
    density_of_states: str = "standard"
    rel_tol: float = 1e-9
    time_factor: str = "unity"
    quantization_volume: float = 1.0
    polarization_factor: float = 1.0
    split_point: float = 50.0

    def __post_init__(self):
        if self.density_of_states not in DENSITY_CONVENTIONS:
            raise ConfigError(f"density_of_states must be one of {DENSITY_CONVENTIONS}")
        if self.time_factor not in TIME_FACTORS:
            raise ConfigError(f"time_factor must be one of {TIME_FACTORS}")
        if not (0.0 < self.rel_tol <= 1e-3):
            raise ConfigError("rel_tol must lie in (0, 1e-3]")
        if self.k_min < 0:
            raise ConfigError("k_min must be >= 0")
        if self.k_max is not None and not (self.k_max > self.k_min):
            raise ConfigError("k_max must exceed k_min")
        if self.quantization_volume <= 0 or self.polarization_factor <= 0:
            raise ConfigError("quantization_volume and polarization_factor must be > 0")
        if self.split_point <= 0:
            raise ConfigError("split_point must be > 0")

    @classmethod
    def preset(cls, name: str, constants=CODATA2018, **overrides) -> "ModeIntegralSpec":
        return cls(k_max=cutoff_wavenumber(name, constants), **overrides)

    def resolved_k_max(self, constants=CODATA2018) -> float:
        k = cutoff_wavenumber("codata", constants) if self.k_max is None else self.k_max
        if not k > self.k_min:
            raise ConfigError("k_max must exceed k_min")
        return k

    def with_(self, **changes) -> "ModeIntegralSpec":
        return replace(self, **changes)

    def density_factor(self) -> float:
        V = self.quantization_volume
        return V / (2.0 * math.pi) ** 3 if self.density_of_states == "standard" else V


# ----------------------------------------------------------------- radial kernels

def _xlogx_pair(tau):
    """0.5 * sum over a in {1+tau, 1-tau} of a ln|a|, stable for large tau."""
    if tau == 1.0:
        return math.log(2.0)
    if tau < 1.0:
        return 0.5 * ((1 + tau) * math.log1p(tau) + (1 - tau) * math.log1p(-tau))
    u = 1.0 / tau
    return math.log(tau) + 0.5 * math.log1p(-u * u) + tau * math.atanh(u)


def _ci(x):
    return float(special.sici(x)[1])


def _si(x):
    return float(special.sici(x)[0])


def _f_series(lam):
    # sum_{n>=1} (-1)^{n+1} L^{2n} / (2n (2n+1)!)
    total, term_pow, sign = 0.0, 1.0, 1.0
    for n in range(1, 12):
        term_pow *= lam * lam
        total += sign * term_pow / (2 * n * math.factorial(2 * n + 1))
        sign = -sign
    return total


def entropy_kernel_closed(lam: float) -> float:
    """F(L) = int_0^L (x - sin x)/x^2 dx = ln L + sin L / L - Ci(L) + gamma - 1."""
    if lam < 0:
        raise ValueError("cutoff must be >= 0")
    if lam == 0:
        return 0.0
    if lam < 0.5:
        return _f_series(lam)
    return math.log(lam) + math.sin(lam) / lam - _ci(lam) + EULER_GAMMA - 1.0


def _f_integrand(x):
    x = np.asarray(x, dtype=float)
    small = x < 1e-2
    xs = np.where(small, 1.0, x)
    big = (xs - np.sin(xs)) / xs**2
    return np.where(small, x / 6.0 - x**3 / 120.0, big)


def _quad(func, a, b, rel_tol, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            return integrate.quad(func, a, b, epsrel=rel_tol, epsabs=1e-15, limit=500, **kw)
        except integrate.IntegrationWarning as exc:
            raise NumericalError(f"quadrature did not converge on [{a}, {b}]: {exc}") from None


def entropy_kernel_numeric(lam: float, split_point=50.0, rel_tol=1e-9):
    """F(L) by quadrature on [0, min(L, x0)] plus the exact tail. Returns (value, error_estimate)."""
    if lam <= 0:
        raise NumericalError(f"cutoff product must be > 0, got {lam!r}")
    head_end = min(lam, split_point)
    head, err = _quad(lambda x: float(_f_integrand(x)), 0.0, head_end, rel_tol)
    if lam <= split_point:
        return head, err
    x0 = split_point
    tail = math.log(lam / x0) + math.sin(lam) / lam - _ci(lam) - math.sin(x0) / x0 + _ci(x0)
    return head + tail, err


def _h(x):
    """(1 - sin x / x) / x, the x-space weight of the entanglement integrand."""
    return float(_f_integrand(x))


def _tail_sin_cos(x, tau):
    # antiderivative of sin(x) cos(tau x) / x^2
    total = 0.0
    for a in (1.0 + tau, 1.0 - tau):
        if a != 0.0:
            total += -math.sin(a * x) / x + a * _ci(abs(a) * x)
    return 0.5 * total


def time_kernel_closed(lam: float, tau: float) -> float:
    """G(L, tau) = int_0^L (1 - sin x / x) cos(tau x) / x dx, tau = c t / r."""
    if tau <= 0:
        return entropy_kernel_closed(lam)
    if lam == 0:
        return 0.0
    rest = 0.0
    for a in (1.0 + tau, 1.0 - tau):
        if a != 0.0:
            rest += math.sin(a * lam) / lam - a * _ci(abs(a) * lam)
    return _ci(tau * lam) - math.log(tau) - 1.0 + 0.5 * rest + _xlogx_pair(tau)


def time_kernel_numeric(lam: float, tau: float, split_point=50.0, rel_tol=1e-9):
    """G(L, tau) by oscillatory-weight quadrature on the head plus the exact tail."""
    if tau <= 0:
        return entropy_kernel_numeric(lam, split_point, rel_tol)
    head_end = min(lam, split_point)
    head, err = _quad(_h, 0.0, head_end, rel_tol, weight="cos", wvar=tau)
    if lam <= split_point:
        return head, err
    x0 = split_point
    tail = (_ci(tau * lam) - _ci(tau * x0)) - (_tail_sin_cos(lam, tau) - _tail_sin_cos(x0, tau))
    return head + tail, err


# ----------------------------------------------------------------- phase

def ab_phase_closed_form(geom: InterferometerGeometry, constants: PhysicalConstants = CODATA2018,
                         gates=(1.0, 1.0)) -> float:
    """G M m t / hbar * (g_u/d_u - g_d/d_d) with arm gates g_xi in {0, 1}."""
    d_u, d_d = arm_distances(geom)
    scale = constants.G * geom.source_mass * geom.atom_mass * geom.interaction_time / constants.hbar
    return scale * (gates[0] / d_u - gates[1] / d_d)


def _phase_prefactor(geom, spec, constants, distance):
    """density * 4 pi * 2 g_s g_xi k^2 / w, which is k-independent."""
    k = 1.0 / distance
    mode = ModeParams.from_wavevector(
        (k, 0.0, 0.0), constants,
        polarization_factor=spec.polarization_factor,
        quantization_volume=spec.quantization_volume,
    )
    g_s = coupling_constant(geom.source_mass, mode, constants)
    g_a = coupling_constant(geom.atom_mass, mode, constants)
    return spec.density_factor() * 4.0 * math.pi * 2.0 * g_s * g_a * k * k / mode.omega


def _arm_phase_numeric(geom, spec, constants, distance):
    k_max = spec.resolved_k_max(constants)
    lam_hi, lam_lo = k_max * distance, spec.k_min * distance

    def si_numeric(lam):
        if lam == 0:
            return 0.0, 0.0
        head_end = min(lam, spec.split_point)
        head, err = _quad(lambda x: float(np.sinc(x / math.pi)), 0.0, head_end, spec.rel_tol)
        if lam > spec.split_point:
            head += _si(lam) - _si(spec.split_point)
        return head, err

    hi, err_hi = si_numeric(lam_hi)
    lo, err_lo = si_numeric(lam_lo)
    pref = _phase_prefactor(geom, spec, constants, distance) * geom.interaction_time / distance
    return pref * (hi - lo), pref * (err_hi + err_lo), 2.0 * pref / lam_hi


def ab_phase_numeric(geom: InterferometerGeometry, spec: ModeIntegralSpec = ModeIntegralSpec(),
                     constants: PhysicalConstants = CODATA2018, gates=(1.0, 1.0), diagnostics=None) -> float:
    """AB phase from the mode integral of the source-arm cross term.

    Each arm contributes density * int d^3k 2 g_s g_xi cos(k.(r_s - r_xi)) t / w;
    after the angular integral the radial part is t/d * int_0^L sin x / x dx
    with L = k_max d.  The quadrature error and the truncation error of the
    finite cutoff (at most 2/L relative) are written into ``diagnostics``.
    """
    d_u, d_d = arm_distances(geom)
    k_max = spec.resolved_k_max(constants)
    d_min = min(d_u, d_d)
    if k_max * d_min < MIN_CUTOFF_PRODUCT:
        need = MIN_CUTOFF_PRODUCT / d_min
        raise CutoffTooSmallError(
            f"k_max * min(d) = {k_max * d_min:.3g} < {MIN_CUTOFF_PRODUCT:g}; need k_max >= {need:.3g} 1/m",
            required_k_max=need,
        )
    phi_u, err_u, cut_u = _arm_phase_numeric(geom, spec, constants, d_u)
    phi_d, err_d, cut_d = _arm_phase_numeric(geom, spec, constants, d_d)
    if diagnostics is not None:
        diagnostics.update(
            phase_quadrature_error=abs(gates[0] * err_u) + abs(gates[1] * err_d),
            phase_cutoff_error_bound=abs(gates[0] * cut_u) + abs(gates[1] * cut_d),
            phase_arm_u=gates[0] * phi_u,
            phase_arm_d=gates[1] * phi_d,
        )
    return gates[0] * phi_u - gates[1] * phi_d


# ----------------------------------------------------------------- entanglement

@dataclass(frozen=True)
class EntropyIntegral:
    value: float  # I = |alpha_u - alpha_d|^2 summed over modes
    in_planck_units: float  # I / (m / m_p)^2
    kernel: float  # radial integral in x = k r
    cutoff_product: float  # L = k_max r
    prefactor: float
    quadrature_error: float
    time_factor: str
    density_of_states: str
    ir_divergent: bool = False


def _entropy_prefactor(atom_mass, distance, spec, constants):
    """density * 16 pi * g^2 k^3 / w^2, k-independent; for density=V this is 32 pi^2 G m^2/(c hbar)."""
    k = 1.0 / distance
    mode = ModeParams.from_wavevector(
        (k, 0.0, 0.0), constants,
        polarization_factor=spec.polarization_factor,
        quantization_volume=spec.quantization_volume,
    )
    g = coupling_constant(atom_mass, mode, constants)
    return spec.density_factor() * 16.0 * math.pi * g * g * k**3 / mode.omega**2


def _planck_units(value, atom_mass, constants):
    if atom_mass == 0:
        return 0.0
    return value / (atom_mass / derive_planck_scale(constants).planck_mass) ** 2


def entropy_integral(separation: float, spec: ModeIntegralSpec = ModeIntegralSpec(), t: float = 1.0,
                     atom_mass: float = RB87_MASS, constants: PhysicalConstants = CODATA2018) -> EntropyIntegral:
    """Total branch distinguishability I for two arms a distance ``separation`` apart.

    unity time factor:  I = P * F(k_max r)
    exact time factor:  I = P * (F - G)(k_max r, c t / r)
    with the k_min end subtracted when k_min > 0.
    """
    if not separation > 0:
        raise NumericalError(f"separation must be > 0, got {separation!r}")
    if atom_mass < 0:
        raise ConfigError("atom_mass must be >= 0")
    k_max = spec.resolved_k_max(constants)
    lam_hi, lam_lo = k_max * separation, spec.k_min * separation
    if not lam_hi > 0:
        raise NumericalError("cutoff product must be > 0")
    tau = constants.c * t / separation

    def kernel(lam):
        if lam == 0:
            return 0.0, 0.0
        f, ef = entropy_kernel_numeric(lam, spec.split_point, spec.rel_tol)
        if spec.time_factor == "unity":
            return f, ef
        g, eg = time_kernel_numeric(lam, tau, spec.split_point, spec.rel_tol)
        return f - g, ef + eg

    hi, e_hi = kernel(lam_hi)
    lo, e_lo = kernel(lam_lo)
    pref = _entropy_prefactor(atom_mass, separation, spec, constants) if atom_mass > 0 else 0.0
    value = pref * (hi - lo)
    return EntropyIntegral(
        value=value,
        in_planck_units=_planck_units(value, atom_mass, constants),
        kernel=hi - lo,
        cutoff_product=lam_hi,
        prefactor=pref,
        quadrature_error=pref * (e_hi + e_lo),
        time_factor=spec.time_factor,
        density_of_states=spec.density_of_states,
    )


def gated_entropy_integral(geom: InterferometerGeometry, spec: ModeIntegralSpec = ModeIntegralSpec(),
                           constants: PhysicalConstants = CODATA2018, gates=(1.0, 1.0)) -> EntropyIntegral:
    """I with per-arm coupling gates.

    The angular average of |c_u e^{-ik.r_u} - c_d e^{-ik.r_d}|^2 is
    c_u^2 + c_d^2 - 2 c_u c_d sinc(k r).  With both gates on this reduces to
    :func:`entropy_integral`; with one gate on the radial integral is
    int dk/k T(k), infrared divergent for the unity time factor and k_min = 0
    (reported with ``ir_divergent=True`` and ``value=nan``).
    """
    c_u, c_d = float(gates[0]), float(gates[1])
    t = geom.interaction_time
    if c_u == c_d == 0.0:
        return EntropyIntegral(0.0, 0.0, 0.0, float("nan"), 0.0, 0.0, spec.time_factor, spec.density_of_states)
    if c_u == c_d == 1.0 and geom.separation > 0:
        return entropy_integral(geom.separation, spec, t, geom.atom_mass, constants)
    if c_u == c_d == 1.0:
        return EntropyIntegral(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, spec.time_factor, spec.density_of_states)
    if c_u * c_d != 0.0:
        raise ConfigError("gates must be 0 or 1")

    # single arm: the sinc cross term vanishes, I = P/2 * int dk/k T(k)
    k_max = spec.resolved_k_max(constants)
    ref = 1.0  # any length scale; the prefactor is k-independent
    pref = 0.5 * _entropy_prefactor(geom.atom_mass, ref, spec, constants)
    if spec.time_factor == "unity":
        if spec.k_min == 0:
            return EntropyIntegral(float("nan"), float("nan"), float("inf"), k_max, pref, 0.0,
                                   spec.time_factor, spec.density_of_states, ir_divergent=True)
        kern = math.log(k_max / spec.k_min)
    else:
        ct = constants.c * t

        def cin(z):
            if z == 0:
                return 0.0
            if z < 1e-3:
                return z * z / 4.0 - z**4 / 96.0
            return EULER_GAMMA + math.log(z) - _ci(z)

        kern = cin(ct * k_max) - cin(ct * spec.k_min)
    value = pref * kern
    return EntropyIntegral(value, _planck_units(value, geom.atom_mass, constants), kern, k_max * ref, pref, 0.0,
                           spec.time_factor, spec.density_of_states)


@dataclass(frozen=True)
class EntropyResult:
    I: float
    linear_entropy: float  # 1/2 (1 - e^{-I})
    linear_entropy_small: float  # I / 2
    visibility: float  # e^{-I/2}
    integral: EntropyIntegral


def _entropy_from_integral(integral: EntropyIntegral) -> EntropyResult:
    I = integral.value
    return EntropyResult(
        I=I,
        linear_entropy=-0.5 * math.expm1(-I),
        linear_entropy_small=0.5 * I,
        visibility=math.exp(-0.5 * I),
        integral=integral,
    )


def linear_entropy_continuum(geom: InterferometerGeometry, spec: ModeIntegralSpec = ModeIntegralSpec(),
                             constants: PhysicalConstants = CODATA2018, gates=(1.0, 1.0)) -> EntropyResult:
    return _entropy_from_integral(gated_entropy_integral(geom, spec, constants, gates))


def visibility(geom: InterferometerGeometry, spec: ModeIntegralSpec = ModeIntegralSpec(),
               constants: PhysicalConstants = CODATA2018, gates=(1.0, 1.0)) -> float:
    return linear_entropy_continuum(geom, spec, constants, gates).visibility


# ----------------------------------------------------------------- report

@dataclass
class PhaseEntropyReport:
    ab_phase_quantum: float
    ab_phase_closed: float
    semiclassical_phase: float
    action_phase: float
    linear_entropy: float
    linear_entropy_small: float
    I_integral: float
    I_half: float
    I_planck_units: float
    visibility: float
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def phase_entropy_report(geom: InterferometerGeometry, spec: ModeIntegralSpec = ModeIntegralSpec(),
                         constants: PhysicalConstants = CODATA2018, gates=(1.0, 1.0)) -> PhaseEntropyReport:
    from .semiclassical import PotentialModel, ab_phase_semiclassical, action_phase

    diag = {
        "k_max_per_m": spec.resolved_k_max(constants),
        "k_min_per_m": spec.k_min,
        "density_of_states": spec.density_of_states,
        "time_factor": spec.time_factor,
        "rel_tol": spec.rel_tol,
        "split_point": spec.split_point,
        "gates": [float(gates[0]), float(gates[1])],
        "amplitude_convention": "mixed-sign",
        "potential_sign": "V = -G M / |x - r_s|",
    }
    if gates == (0.0, 0.0) or tuple(gates) == (0, 0):
        quantum = 0.0
    else:
        quantum = ab_phase_numeric(geom, spec, constants, gates, diagnostics=diag)
    potential = PotentialModel.point_source(geom, constants)
    ent = linear_entropy_continuum(geom, spec, constants, gates)
    diag.update(
        entropy_quadrature_error=ent.integral.quadrature_error,
        entropy_cutoff_product=ent.integral.cutoff_product,
        entropy_ir_divergent=ent.integral.ir_divergent,
    )
    return PhaseEntropyReport(
        ab_phase_quantum=quantum,
        ab_phase_closed=ab_phase_closed_form(geom, constants, gates),
        semiclassical_phase=ab_phase_semiclassical(geom, potential, constants, gates),
        action_phase=action_phase(geom, potential, constants, gates),
        linear_entropy=ent.linear_entropy,
        linear_entropy_small=ent.linear_entropy_small,
        I_integral=ent.I,
        I_half=0.5 * ent.I,
        I_planck_units=ent.integral.in_planck_units,
        visibility=ent.visibility,
        diagnostics=diag,
    )


# ----------------------------------------------------------------- reproduction table

QUOTED = {
    "I_planck_units": 1e4,
    "linear_entropy": 1e-29,
    "kernel_value": 31.0,
    "cutoff_per_m": 1e32,
    "atom_mass_kg": QUOTED_ATOM_MASS,
    "planck_mass_kg": QUOTED_PLANCK_MASS,
}


def quoted_reproduction(separation: float, t: float = 1.0, constants: PhysicalConstants = CODATA2018,
                       time_factor: str = "unity") -> dict:
    """Quoted entanglement estimate next to recomputed values.

    Rows cover both cutoff presets, both density-of-states conventions and
    both atom masses.  ``quoted_chain`` re-evaluates the quoted arithmetic
    10^4 (m / 2.2e-8 kg)^2 for each mass.
    """
    rows = []
    for preset in ("codata", "paper-cutoff"):
        for density in DENSITY_CONVENTIONS:
            spec = ModeIntegralSpec.preset(preset, constants, density_of_states=density, time_factor=time_factor)
            for label, mass in (("quoted", QUOTED_ATOM_MASS), ("rb87", RB87_MASS)):
                ent = _entropy_from_integral(entropy_integral(separation, spec, t, mass, constants))
                rows.append({
                    "cutoff_preset": preset,
                    "density_of_states": density,
                    "atom_mass_label": label,
                    "atom_mass_kg": mass,
                    "kernel": ent.integral.kernel,
                    "I": ent.I,
                    "I_planck_units": ent.integral.in_planck_units,
                    "linear_entropy": ent.linear_entropy,
                    "linear_entropy_small": ent.linear_entropy_small,
                })
    chain = {
        label: QUOTED["I_planck_units"] * (mass / QUOTED_PLANCK_MASS) ** 2
        for label, mass in (("quoted", QUOTED_ATOM_MASS), ("rb87", RB87_MASS))
    }
    return {
        "separation_m": separation,
        "interaction_time_s": t,
        "quoted": dict(QUOTED),
        "quoted_chain_I": chain,
        "rows": rows,
    }
