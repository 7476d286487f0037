import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gravab.errors import ConfigError, NumericalInstabilityError, TruncationRiskError
from gravab.fock_oracle import (
    OracleParams,
    ReducedDensityMatrix,
    TruncatedState,
    analytic_state,
    build_hamiltonian,
    compare_with_analytic,
    evolve,
    ground_state_displacement,
    initial_state,
    linear_entropy,
    reduced_atom_state,
    reduced_field_state,
    required_truncation,
)
from gravab.geometry import InterferometerGeometry
from gravab.singlemode import ModeParams, coherent_amplitude, dynamical_phase, overlap

TEST_POINT = OracleParams(omega=1.0, g_u=0.1, g_d=0.1, g_s=0.2, phase_u=0.6, phase_d=-0.9, phase_s=1.3)
angles = st.floats(-math.pi, math.pi)


def weak_params():
    return st.builds(
        OracleParams,
        omega=st.floats(0.5, 2.0),
        g_u=st.floats(0, 0.12),
        g_d=st.floats(0, 0.12),
        g_s=st.floats(0, 0.12),
        phase_u=angles,
        phase_d=angles,
        phase_s=angles,
        rest_energy=st.floats(0, 10),
    )


def test_free_field_spectrum():
    H = build_hamiltonian(OracleParams(omega=1.5, rest_energy=3.0), 10)
    assert np.count_nonzero(H.matrix - np.diag(np.diag(H.matrix))) == 0
    spectrum = np.sort(np.diag(H.matrix).real)
    expected = np.sort(np.concatenate([1.5 * np.arange(11) + 3.0] * 2))
    assert np.allclose(spectrum, expected)


@given(weak_params())
def test_hermitian(params):
    H = build_hamiltonian(params, 12).matrix
    assert np.max(np.abs(H - H.conj().T)) < 1e-12


def test_ground_state_displacement_is_conjugate_drive():
    H = build_hamiltonian(TEST_POINT, 30)
    for arm in ("u", "d"):
        expected = TEST_POINT.drive(arm).conjugate() / TEST_POINT.omega
        assert ground_state_displacement(H, arm) == pytest.approx(expected, abs=1e-10)


def test_truncation_guard():
    with pytest.raises(TruncationRiskError):
        build_hamiltonian(OracleParams(g_u=0.5, g_d=0.5), 1)
    with pytest.raises(ConfigError):
        build_hamiltonian(OracleParams(), 0)
    with pytest.raises(ConfigError):
        build_hamiltonian(OracleParams(), 513)


def test_evolve_zero_time_identity():
    s = initial_state(8)
    out = evolve(s, build_hamiltonian(TEST_POINT, 8), 0.0)
    assert np.array_equal(out.amplitudes, s.amplitudes)


def test_eigenstate_phase():
    N = 5
    H = build_hamiltonian(OracleParams(omega=1.0), N)
    amps = np.zeros((2, N + 1), dtype=complex)
    amps[0, 1] = 1.0
    out = evolve(TruncatedState(amps, N), H, 0.7)
    assert out.amplitudes[0, 1] == pytest.approx(cmath.exp(-0.7j), abs=1e-14)


@settings(max_examples=50)
@given(weak_params(), st.floats(0, 20), st.integers(0, 2**32 - 1))
def test_unitarity_random_vectors(params, t, seed):
    N = 20
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(2, N + 1)) + 1j * rng.normal(size=(2, N + 1))
    v /= np.linalg.norm(v)
    out = evolve(TruncatedState(v, N), build_hamiltonian(params, N), t)
    assert abs(out.norm - 1.0) < 1e-10


def test_evolve_matches_coherent_projection_at_test_point():
    N = 30
    t = 1.0 / TEST_POINT.omega
    out = evolve(initial_state(N), build_hamiltonian(TEST_POINT, N), t)
    mode = TEST_POINT.mode()
    for i, arm in enumerate(("u", "d")):
        alpha = coherent_amplitude(TEST_POINT.g_s, TEST_POINT.coupling(arm), mode, TEST_POINT.position("s"),
                                   TEST_POINT.position(arm), t, convention="hamiltonian").value
        n = np.arange(N + 1)
        proj = np.exp(-abs(alpha) ** 2 / 2) * alpha**n / np.array([math.sqrt(math.factorial(k)) for k in n])
        # strip the branch phase before comparing
        branch = out.amplitudes[i, 0] / proj[0]
        assert abs(branch) == pytest.approx(1 / math.sqrt(2), abs=1e-8)
        assert np.max(np.abs(out.amplitudes[i] - branch * proj)) < 1e-8


def test_mixed_sign_amplitude_mismatch_only_through_source_phase():
    t = 1.0
    N = 30
    out = evolve(initial_state(N), build_hamiltonian(TEST_POINT, N), t)
    mixed = analytic_state(TEST_POINT, t, N, convention="mixed-sign")
    assert abs(np.vdot(mixed.vector, out.vector)) < 1 - 1e-4
    aligned = OracleParams(**{**TEST_POINT.__dict__, "phase_s": 0.0})
    out0 = evolve(initial_state(N), build_hamiltonian(aligned, N), t)
    mixed0 = analytic_state(aligned, t, N, convention="mixed-sign")
    assert abs(np.vdot(mixed0.vector, out0.vector)) == pytest.approx(1.0, abs=1e-12)


def test_reduced_field_product_state_is_pure():
    N = 6
    amps = np.zeros((2, N + 1), dtype=complex)
    amps[:, 2] = 1 / math.sqrt(2)
    rho = reduced_field_state(TruncatedState(amps, N)).check()
    assert rho.purity == pytest.approx(1.0)
    assert linear_entropy(rho) == pytest.approx(0.0, abs=1e-15)


def test_orthogonal_branches_half_purity():
    N = 6
    amps = np.zeros((2, N + 1), dtype=complex)
    amps[0, 0] = amps[1, 3] = 1 / math.sqrt(2)
    s = TruncatedState(amps, N)
    assert reduced_field_state(s).purity == pytest.approx(0.5)
    assert linear_entropy(reduced_field_state(s)) == pytest.approx(0.5)
    assert reduced_atom_state(s).entries[0, 1] == pytest.approx(0.0)


def test_no_coupling_full_coherence():
    out = evolve(initial_state(4), build_hamiltonian(OracleParams(), 4), 2.0)
    assert abs(reduced_atom_state(out).entries[0, 1]) == pytest.approx(0.5)


def test_test_point_entropy_and_offdiagonal():
    rep = compare_with_analytic(TEST_POINT, 1.0, 40)
    rho_f = reduced_field_state(evolve(initial_state(40), build_hamiltonian(TEST_POINT, 40), 1.0))
    a_u, a_d = rep.alpha_u, rep.alpha_d
    assert rho_f.purity == pytest.approx(0.5 * (1 + abs(overlap(a_d, a_u)) ** 2), abs=1e-10)
    assert rep.entropy_oracle == pytest.approx(0.5 * (1 - math.exp(-abs(a_u - a_d) ** 2)), abs=1e-8)
    assert rep.offdiag_phase_oracle == pytest.approx(rep.offdiag_phase_analytic, abs=1e-8)
    assert rep.offdiag_magnitude_oracle == pytest.approx(rep.offdiag_magnitude_analytic, abs=1e-10)


def test_measured_phase_is_full_time_factor():
    rep = compare_with_analytic(TEST_POINT, 2.0, 40)
    assert rep.offdiag_phase_oracle == pytest.approx(rep.offdiag_phase_analytic, abs=1e-8)
    assert abs(rep.phase_difference_full - rep.phase_difference_linear) > 1e-3


def test_compare_zero_coupling():
    rep = compare_with_analytic(OracleParams(), 1.0, 20)
    assert rep.amplitude_max_error == {"u": 0.0, "d": 0.0}
    assert rep.fidelity == pytest.approx(1.0, abs=2.3e-16)
    assert rep.entropy_oracle == pytest.approx(0.0, abs=1e-15)


def test_compare_truncation_guard():
    strong = OracleParams(g_u=1.5, g_d=1.5)
    with pytest.raises(TruncationRiskError):
        compare_with_analytic(strong, math.pi, 2)


def test_required_truncation_rule():
    assert required_truncation(0.0) == 20
    assert required_truncation(1.0) == 31
    assert required_truncation(3.0) == 9 + 30 + 20


@settings(max_examples=60)
@given(weak_params(), st.floats(0, 12))
def test_rest_energy_changes_no_observable(params, t):
    N = 24
    base = OracleParams(**{**params.__dict__, "rest_energy": 0.0})
    a = compare_with_analytic(params, t, N)
    b = compare_with_analytic(base, t, N)
    assert a.entropy_oracle == pytest.approx(b.entropy_oracle, abs=1e-10)
    assert a.offdiag_magnitude_oracle == pytest.approx(b.offdiag_magnitude_oracle, abs=1e-10)
    assert cmath.exp(1j * a.offdiag_phase_oracle) == pytest.approx(cmath.exp(1j * b.offdiag_phase_oracle), abs=1e-8)


@settings(max_examples=60)
@given(weak_params(), st.floats(0, 12))
def test_reduced_states_valid_and_entropies_match(params, t):
    N = 24
    out = evolve(initial_state(N), build_hamiltonian(params, N), t)
    rho_f = reduced_field_state(out).check()
    rho_a = reduced_atom_state(out).check()
    assert linear_entropy(rho_f) == pytest.approx(linear_entropy(rho_a), abs=1e-10)


def test_density_matrix_check_rejects_bad_input():
    with pytest.raises(NumericalInstabilityError):
        ReducedDensityMatrix(np.diag([1.5, -0.5]).astype(complex)).check()
    with pytest.raises(NumericalInstabilityError):
        ReducedDensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]], dtype=complex)).check()


def test_norm_drift_detected():
    N = 4
    bad = TruncatedState(np.ones((2, N + 1), dtype=complex), N)
    H = build_hamiltonian(OracleParams(), N)
    H.matrix[0, 0] += 1j  # non-Hermitian -> non-unitary
    with pytest.raises(NumericalInstabilityError):
        evolve(bad, H, 1.0)


def test_from_geometry_source_drive_exceeds_any_truncation():
    geom = InterferometerGeometry(r_u=(0, 0, 0.3), r_d=(0, 0, 0.1), r_s=(0, 0, 0),
                                  atom_mass=1.4e-25, source_mass=1250.0, interaction_time=1.0)
    mode = ModeParams.from_wavevector((0, 0, 10.0))
    p = OracleParams.from_geometry(geom, mode)
    assert p.omega == pytest.approx(1.0)
    assert p.g_u < 1e-18
    assert p.phase_u == pytest.approx(3.0)
    # a kilogram-scale source displaces the mode classically, far beyond any Fock truncation
    assert p.g_s > 1e9
    with pytest.raises(TruncationRiskError):
        compare_with_analytic(p, 1.0, 512)
    atoms_only = OracleParams(**{**p.__dict__, "g_s": 0.0})
    rep = compare_with_analytic(atoms_only, 1.0, 20)
    assert rep.fidelity == pytest.approx(1.0, abs=1e-12)
    assert rep.entropy_oracle < 1e-15  # 1 - tr(rho^2) rounding floor


def test_report_serializes():
    d = compare_with_analytic(TEST_POINT, 1.0, 31).to_dict()
    assert set(d["alpha_u"]) == {"re", "im"}
    assert d["params"]["g_s"] == 0.2
