from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wki.errors import InputError
from wki.scattering import (InitialProfile, SpectralBox, boundary_transfer_22, constant_profile, d_factors,
                            exp_d_from_data, find_discrete_spectrum, jost_integrate, norming_fit, phase_p,
                            reflection_coefficient, s22_upper, scattering_at, scattering_batch, spectral_data,
                            trace_formula_residual, winding_number, x_of_y, y_of_x)
from wki.numerics import RealGridFunction
from wki.scattering import SpectralData
from wki.soliton import SolitonParams, soliton_field

from conftest import PLANTED_C, PLANTED_Z

SIGMA2 = np.array([[0, -1j], [1j, 0]])


def test_profile_validation():
    x = np.linspace(-10, 10, 101)
    with pytest.raises(InputError):
        InitialProfile(x, np.full(101, 0.5 + 0j), 0.5, 0.6)
    with pytest.raises(InputError):
        InitialProfile(x, 0.5 + 0.1 * np.exp(-x), 0.5, 0.5)
    assert constant_profile(0.0).phi0 == 1.0


def test_phase_on_constant_profile():
    prof = constant_profile(0.7)
    z, x, t = 0.8 + 0.1j, 3.0, 2.0
    assert phase_p(prof, x, t, z) == pytest.approx(1j * z / 2 * x + 1j * z * z * t / (2 * prof.phi0 ** 2))
    assert phase_p(prof, x, t, 0.0) == 0


def test_phase_grid_refinement(planted_params):
    vals = []
    for n in (3201, 6401):
        x = np.linspace(-40, 40, n)
        q = soliton_field(planted_params, x, 0.0).q
        vals.append(phase_p(InitialProfile(x, q, q[-1], q[0]), 0.0, 0.0, 1.0))
    assert abs(vals[0] - vals[1]) < 1e-9


def test_d_vanishes_for_real_and_constant_profiles():
    x = np.linspace(-20, 20, 401)
    real = InitialProfile(x, 0.5 + 0.3 / np.cosh(x), 0.5, 0.5)
    assert abs(real.d_total) < 1e-14
    assert np.max(np.abs(d_factors(constant_profile(0.4 + 0.3j), 1.0))) < 1e-14


def test_d_grid_refinement(planted_params):
    vals = []
    for n in (6401, 12801):
        x = np.linspace(-40, 40, n)
        q = soliton_field(planted_params, x, 0.0, tol=1e-13).q
        vals.append(InitialProfile(x, q, q[-1], q[0]).d_total)
    assert abs(vals[0] - vals[1]) < 1e-9


def test_y_scale(bump_profile):
    assert y_of_x(constant_profile(0.5), 3.3) == pytest.approx(3.3)
    rng = np.random.default_rng(1)
    xs = rng.uniform(-29, 29, 100)
    assert np.max(np.abs(x_of_y(bump_profile, y_of_x(bump_profile, xs)) - xs)) < 1e-10
    # far right: y - x equals the total excess, computed here by plain trapezoid on a fine grid
    xf = np.linspace(-30, 30, 60001)
    qf = 0.5 * (1 + 0.2 * np.exp(-xf ** 2 / 8) * np.exp(0.3j * xf))
    phi = np.sqrt(1 + np.abs(qf) ** 2)
    excess = np.trapezoid(phi / bump_profile.phi0 - 1, xf)
    assert y_of_x(bump_profile, 30.0) - 30.0 == pytest.approx(excess, abs=1e-9)


def test_constant_profile_is_trivial():
    prof = constant_profile(0.6 + 0.2j)
    cols = jost_integrate(prof, np.array([-1.0, 0.5]), "left")
    assert np.allclose(cols.matrix(), np.eye(2), atol=1e-14)
    s = scattering_batch(prof, [-2.0, 0.3, 4.0])
    assert np.allclose(s, np.eye(2), atol=1e-10)
    assert np.max(np.abs(reflection_coefficient(prof, np.linspace(-3, 3, 7)).values)) < 1e-12
    assert find_discrete_spectrum(prof, SpectralBox(-2, 2, 0.05, 2)) == []


def test_jost_determinant_and_edges(bump_profile):
    for z in (0.7, -1.3):
        left = jost_integrate(bump_profile, z, "left").matrix()
        right = jost_integrate(bump_profile, z, "right").matrix()
        assert np.max(np.abs(np.linalg.det(left) - 1)) < 1e-8
        assert np.max(np.abs(np.linalg.det(right) - 1)) < 1e-8
        assert np.allclose(left[0], np.eye(2), atol=1e-8)
        assert np.allclose(right[-1], np.eye(2), atol=1e-8)


def test_jost_conjugate_symmetry(bump_profile):
    z = 0.4 + 0.3j
    xs = np.linspace(-10, 10, 5)
    up = jost_integrate(bump_profile, z, "left", xs).first
    dn = jost_integrate(bump_profile, np.conj(z), "left", xs).second
    # conj(mu(conj z)) = sigma2 mu(z) sigma2, read column-wise
    mapped = np.array([-1j * SIGMA2 @ np.conj(v) for v in up])
    assert np.max(np.abs(dn - mapped)) < 1e-8


def test_scattering_symmetry_and_unit_determinant(bump_profile):
    s = scattering_batch(bump_profile, np.linspace(-3, 3, 13))
    assert np.max(np.abs(s[:, 0, 0] - np.conj(s[:, 1, 1]))) < 1e-8
    assert np.max(np.abs(s[:, 0, 1] + np.conj(s[:, 1, 0]))) < 1e-8
    # det S = 1 together with the two relations above
    assert np.max(np.abs(np.abs(s[:, 1, 1]) ** 2 + np.abs(s[:, 0, 1]) ** 2 - 1)) < 1e-8


def test_s22_tends_to_one_at_large_z(bump_profile):
    s = scattering_batch(bump_profile, [-60.0, 60.0])
    assert np.max(np.abs(s[:, 1, 1] - 1)) < 1e-3


def test_scattering_at_matches_batch(bump_profile):
    a = scattering_at(bump_profile, 0.9).matrix()
    assert np.allclose(a, scattering_batch(bump_profile, [0.9])[0], atol=1e-14)


def test_reflection_linear_in_perturbation_size():
    x = np.linspace(-30, 30, 1201)
    zs = np.linspace(-3, 3, 25)
    peaks = []
    for eps in (0.01, 0.1):
        q = 0.5 * (1 + eps * np.exp(-x ** 2 / 8) * np.exp(0.3j * x))
        peaks.append(np.max(np.abs(reflection_coefficient(InitialProfile(x, q, q[-1], q[0]), zs).values)))
    assert peaks[1] / peaks[0] == pytest.approx(10.0, rel=0.05)


def test_planted_soliton_is_reflectionless(planted_profile):
    r = reflection_coefficient(planted_profile, np.linspace(-10, 10, 81))
    assert np.max(np.abs(r.values)) <= 1e-3


def test_planted_eigenvalue_and_norming(planted_profile):
    zs = find_discrete_spectrum(planted_profile, SpectralBox(-3, 3, 0.05, 3))
    assert len(zs) == 1 and abs(zs[0] - PLANTED_Z) < 1e-4
    fit = norming_fit(planted_profile, zs[0])
    assert abs(fit.c / PLANTED_C - 1) < 1e-3
    assert fit.residual < 1e-6


def test_planted_norming_grid_invariance(planted_params):
    cs = []
    for n in (2401, 3201):
        x = np.linspace(-40, 40, n)
        q = soliton_field(planted_params, x, 0.0).q
        cs.append(norming_fit(InitialProfile(x, q, q[-1], q[0]), PLANTED_Z).c)
    assert abs(cs[0] - cs[1]) < 1e-4


def test_two_soliton_spectrum():
    params = SolitonParams((0.6 + 0.15j, -0.8 + 0.2j), (1.0, 1.0), 0.8)
    x = np.linspace(-150, 150, 6001)
    q = soliton_field(params, x, 0.0).q
    prof = InitialProfile(x, q, 0.8 * q[-1] / abs(q[-1]), params.q_minus)
    box = SpectralBox(-2, 2, 0.05, 1)
    assert winding_number(prof, box) == 2
    zs = find_discrete_spectrum(prof, box)
    assert max(min(abs(z - w) for w in zs) for z in params.eigenvalues) < 1e-4


def test_trace_formula_reflectionless(planted_profile):
    zs = np.linspace(-10, 10, 81)
    data = SpectralData(RealGridFunction(zs, np.zeros(81, complex)), (PLANTED_Z,), (PLANTED_C,),
                        planted_profile.phi0, planted_profile.q_minus, planted_profile.q_plus,
                        planted_profile.d_total)
    for z in (0.3 + 0.2j, -1 + 1j, 2 + 0.5j):
        exact = (z - PLANTED_Z) / (z - np.conj(PLANTED_Z))
        assert abs(s22_upper(planted_profile, z) - exact) < 1e-6
        assert trace_formula_residual(data, z, s22_upper(planted_profile, z)) < 1e-6


def test_trace_formula_trivial_data():
    prof = constant_profile(0.5)
    data = spectral_data(prof, np.linspace(-3, 3, 13))
    assert trace_formula_residual(data, 0.2 + 0.5j, 1.0) == 0


def test_trace_formula_generic_at_i():
    from wki.cli import fixture_profile
    prof = fixture_profile()
    data = spectral_data(prof, np.linspace(-20, 20, 321))
    assert trace_formula_residual(data, 1j, s22_upper(prof, 1j)) < 1e-4


def test_exp_d_reflectionless(planted_profile):
    zs = np.linspace(-10, 10, 81)
    data = SpectralData(RealGridFunction(zs, np.zeros(81, complex)), (PLANTED_Z,), (PLANTED_C,),
                        planted_profile.phi0, planted_profile.q_minus, planted_profile.q_plus, 0.0)
    assert abs(exp_d_from_data(data) - np.exp(planted_profile.d_total)) < 1e-5


def test_boundary_transfer_equal_limits():
    assert boundary_transfer_22(0.3 + 0.4j, 0.3 + 0.4j) == pytest.approx(1.0)


@settings(max_examples=10, deadline=None)
@given(st.floats(-2.5, 2.5), st.floats(0.05, 0.2))
def test_unimodular_background_rotation_keeps_reflection_modulus(z, eps):
    # q -> e^{i a} q rotates the data by a constant phase; |r| is unchanged
    x = np.linspace(-20, 20, 401)
    base = 0.5 * (1 + eps / np.cosh(x) * np.exp(0.4j * x))
    r0 = reflection_coefficient(InitialProfile(x, base, base[-1], base[0]), [z, z + 0.1]).values[0]
    rot = np.exp(0.7j) * base
    r1 = reflection_coefficient(InitialProfile(x, rot, rot[-1], rot[0]), [z, z + 0.1]).values[0]
    assert abs(abs(r0) - abs(r1)) < 1e-8
