"""Brute-force single-mode reference in a truncated Fock basis.

Works in dimensionless units (hbar = 1, rates in units chosen by the caller).
The Hilbert space is {u, d} x {|0>, ..., |N>}; the source mass is a classical
label whose coupling enters both arm blocks identically.  Each block is

    H_xi = w b'b + E_rest - (beta_xi b + conj(beta_xi) b'),
    beta_xi = g_xi e^{i k.r_xi} + g_s e^{i k.r_s},

and evolution is a dense matrix exponential (scipy's scaling-and-squaring Pade).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _kernels
from .constants import CODATA2018
from .errors import ConfigError, NumericalInstabilityError, TruncationRiskError
from .singlemode import ModeParams, coherent_amplitude, coupling_constant, dynamical_phase, overlap

__all__ = [
    "OracleParams",
    "OracleHamiltonian",
    "TruncatedState",
    "ReducedDensityMatrix",
    "FidelityReport",
    "MAX_LEVELS",
    "build_hamiltonian",
    "initial_state",
    "evolve",
    "analytic_state",
    "reduced_field_state",
    "reduced_atom_state",
    "linear_entropy",
    "ground_state_displacement",
    "required_truncation",
    "compare_with_analytic",
]

MAX_LEVELS = 512
ARMS = ("u", "d")


@dataclass(frozen=True)
class OracleParams:
    """Dimensionless single-mode parameters.

    ``phase_*`` are the products k.r for each position; ``rest_energy`` is
    the (m c^2 + M c^2)/hbar offset shared by both arm blocks.
    """

    omega: float = 1.0
    g_u: float = 0.0
    g_d: float = 0.0
    g_s: float = 0.0
    phase_u: float = 0.0
    phase_d: float = 0.0
    phase_s: float = 0.0
    rest_energy: float = 0.0

    def __post_init__(self):
        if not self.omega > 0:
            raise ConfigError("oracle omega must be > 0")

    def coupling(self, arm):
        return self.g_u if arm == "u" else self.g_d

    def drive(self, arm) -> complex:
        phase = self.phase_u if arm == "u" else self.phase_d
        return self.coupling(arm) * cmath.exp(1j * phase) + self.g_s * cmath.exp(1j * self.phase_s)

    # the phases k.r are carried by a unit wavevector along x
    def mode(self) -> ModeParams:
        return ModeParams(k=(1.0, 0.0, 0.0), omega=self.omega)

    def position(self, who) -> tuple:
        return ({"u": self.phase_u, "d": self.phase_d, "s": self.phase_s}[who], 0.0, 0.0)

    def max_displacement(self) -> float:
        """Largest |alpha| reachable at any time: 2|beta|/w."""
        return max(2.0 * abs(self.drive(a)) / self.omega for a in ARMS)

    @classmethod
    def from_geometry(cls, geom, mode: ModeParams, constants=CODATA2018, gates=(1.0, 1.0), time_unit=None):
        """SI geometry and mode -> dimensionless params with time measured in ``time_unit`` (default 1/w)."""
        unit = 1.0 / mode.omega if time_unit is None else time_unit
        g_atom = coupling_constant(geom.atom_mass, mode, constants) * unit
        return cls(
            omega=mode.omega * unit,
            g_u=gates[0] * g_atom,
            g_d=gates[1] * g_atom,
            g_s=coupling_constant(geom.source_mass, mode, constants) * unit,
            phase_u=float(np.dot(mode.k, geom.r_u)),
            phase_d=float(np.dot(mode.k, geom.r_d)),
            phase_s=float(np.dot(mode.k, geom.r_s)),
        )


@dataclass(frozen=True, eq=False)
class OracleHamiltonian:
    matrix: np.ndarray
    params: OracleParams
    truncation: int

    @property
    def levels(self):
        return self.truncation + 1


@dataclass(eq=False)
class TruncatedState:
    amplitudes: np.ndarray  # shape (2, N+1); row 0 is arm u, row 1 arm d
    truncation: int

    @property
    def vector(self):
        return self.amplitudes.reshape(-1)

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))


@dataclass(eq=False)
class ReducedDensityMatrix:
    entries: np.ndarray

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    @property
    def purity(self) -> float:
        return float(np.sum(np.abs(self.entries) ** 2))

    def check(self, atol=1e-10):
        """Raise if not Hermitian, positive semidefinite with unit trace."""
        rho = self.entries
        if np.max(np.abs(rho - rho.conj().T)) > atol:
            raise NumericalInstabilityError("reduced state is not Hermitian")
        if abs(self.trace - 1.0) > atol:
            raise NumericalInstabilityError(f"reduced state trace {self.trace!r} != 1")
        lowest = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
        if lowest < -atol:
            raise NumericalInstabilityError(f"reduced state has negative eigenvalue {lowest!r}")
        return self


def _ladder(levels):
    return np.diag(np.sqrt(np.arange(1, levels, dtype=float)), k=1)


def build_hamiltonian(params: OracleParams, N: int, check_truncation=True) -> OracleHamiltonian:
    if N < 1:
        raise ConfigError("truncation N must be >= 1")
    if N > MAX_LEVELS:
        raise ConfigError(f"truncation N must be <= {MAX_LEVELS}")
    predicted = params.max_displacement() ** 2
    if check_truncation and predicted > N / 4:
        raise TruncationRiskError(
            f"predicted |alpha|^2 = {predicted:.4g} exceeds N/4 = {N / 4:.4g}; increase N"
        )
    levels = N + 1
    b = _ladder(levels)
    number = np.diag(np.arange(levels, dtype=float))
    H = np.zeros((2 * levels, 2 * levels), dtype=np.complex128)
    for i, arm in enumerate(ARMS):
        beta = params.drive(arm)
        block = params.omega * number + params.rest_energy * np.eye(levels) - (beta * b + np.conj(beta) * b.T)
        H[i * levels:(i + 1) * levels, i * levels:(i + 1) * levels] = block
    return OracleHamiltonian(matrix=H, params=params, truncation=N)


def initial_state(N: int) -> TruncatedState:
    """Equal superposition of both arms with the field in vacuum."""
    amps = np.zeros((2, N + 1), dtype=np.complex128)
    amps[:, 0] = 1.0 / math.sqrt(2.0)
    return TruncatedState(amps, N)


def evolve(state: TruncatedState, H: OracleHamiltonian, t: float, norm_tol=1e-8) -> TruncatedState:
    if state.truncation != H.truncation:
        raise ConfigError("state and Hamiltonian truncations differ")
    if t == 0:
        return TruncatedState(state.amplitudes.copy(), state.truncation)
    U = scipy.linalg.expm(-1j * t * H.matrix)
    out = (U @ state.vector).reshape(2, -1)
    drift = abs(np.linalg.norm(out) - state.norm)
    if drift > norm_tol:
        raise NumericalInstabilityError(
            f"norm drifted by {drift:.3g} during evolution; try a larger N or a shorter t"
        )
    return TruncatedState(out, state.truncation)


def analytic_amplitudes(params: OracleParams, t: float, convention="hamiltonian"):
    mode = params.mode()
    alphas, phases = {}, {}
    for arm in ARMS:
        g = params.coupling(arm)
        alphas[arm] = coherent_amplitude(params.g_s, g, mode, params.position("s"), params.position(arm), t,
                                         convention=convention).value
        phases[arm] = dynamical_phase(params.g_s, g, mode, params.position("s"), params.position(arm), t)
    return alphas, phases


def analytic_state(params: OracleParams, t: float, N: int, convention="hamiltonian") -> TruncatedState:
    """Closed-form state (1/sqrt2) sum_xi e^{i phi_xi} |m_xi>|alpha_xi>, projected on N+1 levels."""
    alphas, phases = analytic_amplitudes(params, t, convention)
    rest = cmath.exp(-1j * params.rest_energy * t)
    amps = np.empty((2, N + 1), dtype=np.complex128)
    for i, arm in enumerate(ARMS):
        amps[i] = rest * cmath.exp(1j * phases[arm]) * _kernels.coherent_projection(alphas[arm], N + 1) / math.sqrt(2)
    return TruncatedState(amps, N)


def reduced_field_state(state: TruncatedState) -> ReducedDensityMatrix:
    psi = state.amplitudes
    return ReducedDensityMatrix(psi.T @ psi.conj())


def reduced_atom_state(state: TruncatedState) -> ReducedDensityMatrix:
    psi = state.amplitudes
    return ReducedDensityMatrix(psi @ psi.conj().T)


def linear_entropy(rho: ReducedDensityMatrix) -> float:
    return 1.0 - rho.purity


def ground_state_displacement(H: OracleHamiltonian, arm="u") -> complex:
    """<b> in the ground state of one arm block (dense eigensolve)."""
    n = H.levels
    i = ARMS.index(arm)
    block = H.matrix[i * n:(i + 1) * n, i * n:(i + 1) * n]
    _, vecs = np.linalg.eigh(block)
    v = vecs[:, 0]
    return complex(v.conj() @ (_ladder(n) @ v))


def required_truncation(max_abs_alpha: float) -> int:
    a2 = max_abs_alpha**2
    return int(math.ceil(a2 + 10.0 * math.sqrt(a2) + 20.0))


@dataclass
class FidelityReport:
    fidelity: float
    amplitude_max_error: dict
    entropy_oracle: float
    entropy_atom_side: float
    entropy_analytic: float
    entropy_discrepancy: float
    offdiag_phase_oracle: float
    offdiag_phase_analytic: float
    offdiag_magnitude_oracle: float
    offdiag_magnitude_analytic: float
    phase_difference_full: float
    phase_difference_linear: float
    alpha_u: complex
    alpha_d: complex
    truncation: int
    required_truncation: int
    t: float
    params: OracleParams = field(repr=False)

    def to_dict(self):
        out = {}
        for key, value in self.__dict__.items():
            if key == "params":
                out[key] = dict(value.__dict__)
            elif isinstance(value, complex):
                out[key] = {"re": value.real, "im": value.imag}
            else:
                out[key] = value
        return out


def _wrap(angle):
    return (angle + math.pi) % (2 * math.pi) - math.pi


def compare_with_analytic(params: OracleParams, t: float, N: int) -> FidelityReport:
    """Evolve with the dense oracle and compare to the closed-form state."""
    alphas, phases = analytic_amplitudes(params, t)
    need = required_truncation(max(abs(a) for a in alphas.values()))
    if N < need:
        raise TruncationRiskError(f"truncation N={N} below required {need} for |alpha| at t={t!r}")
    H = build_hamiltonian(params, N)
    oracle = evolve(initial_state(N), H, t)
    exact = analytic_state(params, t, N)

    rho_f = reduced_field_state(oracle)
    rho_a = reduced_atom_state(oracle)
    dalpha2 = abs(alphas["u"] - alphas["d"]) ** 2
    s_exact = -0.5 * math.expm1(-dalpha2)
    s_field = linear_entropy(rho_f)
    ov = overlap(alphas["d"], alphas["u"])
    dphi = phases["u"] - phases["d"]

    mode = params.mode()
    lin = {
        arm: dynamical_phase(params.g_s, params.coupling(arm), mode, params.position("s"), params.position(arm), t,
                             time_factor="linear")
        for arm in ARMS
    }
    return FidelityReport(
        fidelity=float(abs(np.vdot(exact.vector, oracle.vector))),
        amplitude_max_error={arm: float(np.max(np.abs(exact.amplitudes[i] - oracle.amplitudes[i])))
                             for i, arm in enumerate(ARMS)},
        entropy_oracle=s_field,
        entropy_atom_side=linear_entropy(rho_a),
        entropy_analytic=s_exact,
        entropy_discrepancy=abs(s_field - s_exact),
        offdiag_phase_oracle=cmath.phase(rho_a.entries[0, 1]),
        offdiag_phase_analytic=_wrap(dphi + cmath.phase(ov)),
        offdiag_magnitude_oracle=float(abs(rho_a.entries[0, 1])),
        offdiag_magnitude_analytic=0.5 * abs(ov),
        phase_difference_full=dphi,
        phase_difference_linear=lin["u"] - lin["d"],
        alpha_u=alphas["u"],
        alpha_d=alphas["d"],
        truncation=N,
        required_truncation=need,
        t=t,
        params=params,
    )
