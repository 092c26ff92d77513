from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import least_squares

from wki.errors import InputError, SingularSystem
from wki.numerics import RealGridFunction
from wki.oracle import residual_of
from wki.soliton import (SolitonParams, min_stretch, modify_norming, nsoliton_matrix, one_soliton_matrix,
                         partition_spectrum, pole_expansion, reconstruct_from_n1, residue_defect,
                         soliton_field, soliton_in_y, time_phase)

REGULAR = SolitonParams.single(0.5 + 0.3j, 1.0, 0.5)


def test_params_validation():
    with pytest.raises(InputError):
        SolitonParams.single(0.5 - 0.1j, 1.0)
    with pytest.raises(InputError):
        SolitonParams.single(0.5 + 0.1j, 0.0)
    with pytest.raises(InputError):
        SolitonParams((0.5 + 0.1j, 0.5 + 0.1j), (1.0, 1.0))


def test_reflectionless_exp_d():
    p = SolitonParams((0.5 + 0.8j, -1 + 0.2j), (1, 2), 0.3)
    assert p.exp_d_value == pytest.approx((0.5 + 0.8j) / (0.5 - 0.8j) * (-1 + 0.2j) / (-1 - 0.2j))


def test_partition_examples():
    part = partition_spectrum([0.5 + 0.8j], 0.0)
    assert part.delta_plus == (0,) and part.delta_minus == ()
    assert partition_spectrum([0.5 + 0.8j], 0.5).delta_plus == (0,)
    part = partition_spectrum([0.5 + 0.8j, -0.5 + 1j], 0.0)
    assert part.rho == pytest.approx(0.5 * min(abs(1 - 0.2j), 0.8))
    assert part.rho == pytest.approx(0.4)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=3).filter(lambda z: z.imag > 0.05), min_size=1, max_size=5,
                unique_by=lambda z: (round(z.real, 3), round(z.imag, 3))),
       st.floats(-3, 3))
def test_partition_is_a_partition(zs, z0):
    if any(abs(a - b) < 1e-8 for i, a in enumerate(zs) for b in zs[:i]):
        return
    part = partition_spectrum(zs, z0)
    assert sorted(part.delta_plus + part.delta_minus) == list(range(len(zs)))
    assert sorted(part.z_in_I + part.z_left_I + part.z_right_I) == list(range(len(zs)))


def test_modify_norming_trivial_reflection():
    r = RealGridFunction(np.linspace(-5, 5, 41), np.zeros(41, complex))
    assert modify_norming(1.5 - 0.2j, r, 0.3, 0.5 + 0.4j) == 1.5 - 0.2j


def test_modify_norming_piecewise_constant_weight():
    # |r| = 1 on (z0, 2): log(1 + |r|^2) = log 2 there, antiderivative is a log ratio
    nodes = np.linspace(0.2, 2.0, 37)
    r = RealGridFunction(nodes, np.ones(37, complex), compact=True)
    zj = 0.7 + 0.5j
    expected = cmath.exp(1j / math.pi * math.log(2) * (cmath.log(2.0 - zj) - cmath.log(0.2 - zj)))
    assert modify_norming(1.0, r, 0.2, zj) == pytest.approx(expected, abs=1e-12)


def test_modify_norming_conjugation():
    s = np.linspace(-6, 6, 241)
    r = RealGridFunction(s, 0.4 * np.exp(-s * s) * np.exp(0.3j * s))
    zj = 0.4 + 0.6j
    # the weight log(1 + |r|^2) is real, so the exponent at conj(z_j) is the conjugate exponent
    a = modify_norming(1.0, r, 0.1, zj)
    b = modify_norming(1.0, r, 0.1, np.conj(zj))
    assert abs(np.log(a) - np.conj(np.log(b)) * -1) < 1e-12


def test_large_z_limit_and_empty_spectrum():
    p = SolitonParams.single(0.5 + 0.8j, 1.0, 0.7)
    m = nsoliton_matrix(p, 0.3, 1.0, 1e6j)
    assert np.max(np.abs(m - np.eye(2))) <= 1e-5
    empty = SolitonParams((), (), 0.7)
    assert np.allclose(nsoliton_matrix(empty, 1.0, 2.0, 0.3 + 0.1j), np.eye(2))
    with pytest.raises(SingularSystem):
        nsoliton_matrix(p, 0.0, 0.0, 0.5 + 0.8j)


@pytest.mark.parametrize("y,t", [(0.0, 0.0), (1.3, -2.0), (-4.0, 3.0)])
def test_single_pole_closed_form(y, t):
    p = SolitonParams.single(0.5 + 0.8j, 1.0 - 0.3j, 0.7)
    for z in (0.2 + 0.1j, -1.0, 3 - 2j):
        assert np.max(np.abs(one_soliton_matrix(p, y, t, z).entries - nsoliton_matrix(p, y, t, z))) < 1e-13


def test_residue_conditions():
    p = SolitonParams((0.5 + 0.8j, -0.6 + 0.3j, 0.1 + 0.5j), (1.0, 0.5j, 2.0), 0.6)
    for y, t in [(0.0, 0.0), (2.0, 1.0), (-3.0, -0.5)]:
        assert residue_defect(p, y, t) <= 1e-12


def test_reconstruction_of_identity():
    rec = reconstruct_from_n1(np.zeros((2, 2)), np.zeros((2, 2)), 1.0, 0.6 + 0.2j)
    assert rec.q == pytest.approx(0.6 + 0.2j)
    assert rec.rho == pytest.approx(1.0)
    empty = SolitonParams((), (), 0.6 + 0.2j)
    frame = soliton_field(empty, np.linspace(-3, 3, 7), 1.0)
    assert np.allclose(frame.q, 0.6 + 0.2j)


def test_y_derivative_matches_finite_difference():
    ys = np.array([-1.0, 0.2, 1.5])
    t = 0.7
    h = 1e-5
    jet = pole_expansion(REGULAR, ys, t).zero_jet()
    jp = pole_expansion(REGULAR, ys + h, t).zero_jet()
    jm = pole_expansion(REGULAR, ys - h, t).zero_jet()
    assert np.max(np.abs(jet.dm0 - (jp.m0 - jm.m0) / (2 * h))) < 1e-7
    assert np.max(np.abs(jet.dm1 - (jp.m1 - jm.m1) / (2 * h))) < 1e-7


def test_translation_covariance():
    # shifting y by D is the same as rescaling the norming constant by exp(i z1 D)
    ys = np.linspace(-15, 15, 30001)
    shift = 2.5
    z1 = REGULAR.eigenvalues[0]
    moved = SolitonParams.single(z1, REGULAR.norming[0] * cmath.exp(1j * z1 * shift), REGULAR.q_minus)
    a = np.abs(soliton_in_y(REGULAR, ys, 0.0).q)
    b = np.abs(soliton_in_y(moved, ys, 0.0).q)
    dy = ys[1] - ys[0]
    assert abs((ys[np.argmax(b)] - ys[np.argmax(a)]) - shift) <= dy


def test_loop_profile_detected():
    # deep eigenvalue on a weak background gives a non-monotone hodograph
    assert min_stretch(SolitonParams.single(0.5 + 0.8j, 1.0, 0.5), 0.0) < 0
    assert min_stretch(REGULAR, 0.0) > 0


def test_keystone_residual_on_converged_grid():
    f = lambda x, t: soliton_field(REGULAR, x, t, tol=1e-13).q
    x = np.arange(-10, 10 + 1e-9, 0.00125)
    assert residual_of(f, x, [0.0, 5.0], dt=1e-3) <= 1e-6


def test_residual_fourth_order_convergence():
    f = lambda x, t: soliton_field(REGULAR, x, t, tol=1e-13).q
    dxs = np.array([0.04, 0.02, 0.01])
    res = [residual_of(f, np.arange(-10, 10 + 1e-9, dx), [1.0], dt=1e-3) for dx in dxs]
    slope = np.polyfit(np.log(dxs), np.log(res), 1)[0]
    assert abs(slope - 4) <= 0.5


def test_zero_background_amplitude_scaling():
    # small background: peak excess over the background grows with Im z1
    peaks = []
    for eta in (0.1, 0.2):
        p = SolitonParams.single(0.5 + eta * 1j, 1.0, 1e-3)
        ys = np.linspace(-60, 60, 4001)
        peaks.append(np.max(np.abs(soliton_in_y(p, ys, 0.0).q)))
    assert peaks[1] > peaks[0]
    p = SolitonParams.single(0.5 + 0.2j, 1.0, 1e-3)
    f = lambda x, t: soliton_field(p, x, t, tol=1e-13).q
    assert residual_of(f, np.arange(-30, 30 + 1e-9, 0.005), [0.0], dt=1e-3) <= 1e-6


def test_two_solitons_separate():
    z1, z2 = 0.6 + 0.3j, -0.6 + 0.3j
    both = SolitonParams((z1, z2), (1.0, 1.0), 0.5)
    t = 60.0
    phi0 = both.phi0
    for zk, other in ((z1, z2), (z2, z1)):
        # the weight of each pole is O(1) where y + 2 Re z t / phi0^2 is O(1)
        core = -2 * zk.real * t / phi0 ** 2
        ys = np.linspace(core - 10, core + 10, 801)
        q2 = soliton_in_y(both, ys, t).q
        assert np.max(np.abs(q2 - q2[0])) > 0.1

        def misfit(p):
            single = SolitonParams.single(zk, np.exp(p[0] + 1j * p[1]), 0.5, exp_d=np.exp(1j * p[2]))
            d = soliton_in_y(single, ys, t).q - q2 * np.exp(1j * p[3])
            return np.r_[d.real, d.imag]

        starts = [(a, b, c, 0.0) for a in (-1, 0, 1) for b in (-2, 0, 2) for c in (-2, 0, 2)]
        best = min((least_squares(misfit, s0) for s0 in starts), key=lambda r: r.cost)
        assert np.max(np.abs(misfit(best.x))) < 1e-3


def test_time_phase_definition():
    assert time_phase(2.0, 1.0, 0.0, 1.0) == 2j
    assert time_phase(1.0, 0.0, 2.0, math.sqrt(2)) == pytest.approx(1j)
