"""End-to-end acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line that is repeated in the terminal summary.
The decay-law run (criterion 7) integrates a 20001-node grid up to t = 320 and
takes a quarter of an hour or so; everything else finishes within a minute.
"""
from __future__ import annotations

import math
import time

import numpy as np
import pytest

from conftest import PLANTED_C, PLANTED_Z, record_acceptance
from wki import asymptotics as asy
from wki.cli import run_checks, slope_fit
from wki.oracle import FieldFrame, SimConfig, conserved, residual_of, simulate
from wki.scattering import InitialProfile, SpectralBox, spectral_data
from wki.soliton import SolitonParams, soliton_field

# a travelling soliton on the zero background (finite-density single poles breathe)
KEYSTONE = SolitonParams.single(0.5 + 0.3j, 1.0, 0.0)
DECAY_TIMES = (40.0, 80.0, 160.0, 320.0)
DECAY_RAYS = (-1.0, -0.8, -0.6, -0.4, 0.4, 0.6)


def _soliton(x, t):
    return soliton_field(KEYSTONE, np.asarray(x, float), t, tol=1e-13).q


@pytest.fixture(scope="module")
def keystone_run():
    dx = 0.04
    x = np.arange(-80.0, 80.0 + dx / 2, dx)
    cfg = SimConfig(x[0], x[-1], len(x), 0.2 * dx * dx, 5.0, frame_every=0.5)
    return simulate(cfg, FieldFrame(0.0, x, _soliton(x, 0.0)))


def _small_data_profile(x):
    qb = 0.5
    return qb * (1 + 0.2 * np.exp(-x ** 2 / 18) * np.exp(0.3j * x))


@pytest.fixture(scope="module")
def small_data_spectrum():
    x = np.linspace(-50.0, 50.0, 4001)
    q = _small_data_profile(x)
    return spectral_data(InitialProfile(x, q, q[-1], q[0]), np.linspace(-5.0, 5.0, 321),
                         SpectralBox(-4.0, 4.0, 0.02, 3.0))


@pytest.fixture(scope="module")
def small_data_run():
    half, dx = 2000.0, 0.1
    n = int(round(2 * half / dx)) + 1
    x = np.linspace(-half, half, n)
    phi0 = math.sqrt(1 + 0.25)
    cfg = SimConfig(-half, half, n, 0.2 * dx * dx * phi0, DECAY_TIMES[-1], frame_every=40.0)
    start = time.time()
    frames = simulate(cfg, FieldFrame(0.0, x, _small_data_profile(x)))
    return frames, time.time() - start


def test_criterion_1_soliton_keystone(keystone_run):
    residuals = {}
    for dx in (0.0025, 0.00125):
        x = np.arange(-20.0, 20.0 + dx / 2, dx)
        residuals[dx] = residual_of(_soliton, x, [0.0, 2.5, 5.0], dt=1e-3)
    # both meshes already sit at the rounding floor, so refinement cannot shrink it further
    converged = max(residuals.values()) <= 1e-6 and abs(residuals[0.00125] - residuals[0.0025]) <= 1e-6
    sim_err = max(np.max(np.abs(fr.q - _soliton(fr.x_nodes, fr.t))) for fr in keystone_run)
    ok = converged and residuals[0.00125] <= 1e-6 and sim_err <= 1e-4 and keystone_run[-1].t == pytest.approx(5.0)
    record_acceptance(1, ok, f"residual {residuals[0.0025]:.2e} -> {residuals[0.00125]:.2e}, "
                             f"simulation vs soliton up to t=5: {sim_err:.2e}")
    assert ok


def test_criterion_2_roundtrip(planted_profile):
    data = spectral_data(planted_profile, np.linspace(-10.0, 10.0, 81), SpectralBox(-3.0, 3.0, 0.05, 3.0))
    ok = len(data.eigenvalues) == 1
    z_err = abs(data.eigenvalues[0] - PLANTED_Z) if ok else math.inf
    c_err = abs(data.norming[0] / PLANTED_C - 1) if ok else math.inf
    r_max = float(np.max(np.abs(data.r.values)))
    ok = ok and z_err <= 1e-4 and c_err <= 1e-3 and r_max <= 1e-3
    record_acceptance(2, ok, f"|dz| {z_err:.1e}, |dc/c| {c_err:.1e}, max|r| {r_max:.1e}")
    assert ok


@pytest.fixture(scope="module")
def checks():
    return run_checks()


def _group(checks, names):
    entries = {k: v for k, v in checks.items() if any(k.startswith(n) for n in names)}
    ok = all(measured <= tol for tol, measured in entries.values())
    detail = ", ".join(f"{k} {m:.1e}<={t:.0e}" for k, (t, m) in entries.items())
    return ok, detail


def test_criterion_3_trace_formula(checks):
    ok, detail = _group(checks, ["trace_formula"])
    record_acceptance(3, ok, detail)
    assert ok


def test_criterion_4_T_suite(checks):
    ok, detail = _group(checks, ["T_jump_ratio", "T_reciprocal", "T_large_z", "T0_unimodular"])
    record_acceptance(4, ok, detail)
    assert ok


def test_criterion_5_parabolic_cylinder_model(checks):
    ok, detail = _group(checks, ["pc_jump", "pc_m1_fit", "beta_product"])
    record_acceptance(5, ok, detail)
    assert ok


def test_criterion_6_jump_factorization(checks):
    ok, detail = _group(checks, ["factorization_right", "factorization_left"])
    record_acceptance(6, ok, detail)
    assert ok


def test_criterion_9_E_scaling():
    pc = asy.pc_coefficients(0.5 * np.exp(0.3j))
    ts = np.array([1e2, 1e3, 1e4])
    norms = [np.max(np.abs(asy.E_leading(np.eye(2), np.eye(2), pc, -0.5, math.sqrt(1.25), -t).E0 - np.eye(2)))
             for t in ts]
    slope = slope_fit(ts, norms)["slope"]
    ok = abs(slope + 0.5) <= 0.02
    record_acceptance(9, ok, f"slope {slope:.4f}")
    assert ok


def _ray_errors(frame: FieldFrame, spec, z0: float, terms: int) -> float:
    cfg = asy.AsymptoticConfig(terms=terms)
    worst = 0.0
    for z in z0 + np.linspace(-0.03, 0.03, 5):
        x = -2 * frame.t * z / spec.phi0 ** 2
        q = np.interp(x, frame.x_nodes, frame.q.real) + 1j * np.interp(x, frame.x_nodes, frame.q.imag)
        worst = max(worst, abs(q - asy.asymptotic_q(x, frame.t, spec, cfg)))
    return worst


def test_criterion_7_decay_law(small_data_spectrum, small_data_run):
    frames, elapsed = small_data_run
    spec = small_data_spectrum
    selected = [f for f in frames if any(abs(f.t - t) < 1e-6 for t in DECAY_TIMES)]
    assert len(selected) == len(DECAY_TIMES)
    slopes = {1: [], 2: []}
    for z0 in DECAY_RAYS:
        for terms in (1, 2):
            errs = [_ray_errors(f, spec, z0, terms) for f in selected]
            slopes[terms].append(slope_fit([f.t for f in selected], errs)["slope"])
    ok = (not spec.eigenvalues and
          all(-0.65 <= s <= -0.35 for s in slopes[1]) and
          all(s <= -0.6 for s in slopes[2]) and elapsed <= 3600)
    record_acceptance(7, ok, f"solitonless: {not spec.eigenvalues}; 1-term slopes "
                             f"{min(slopes[1]):.3f}..{max(slopes[1]):.3f}, 2-term slopes "
                             f"{min(slopes[2]):.3f}..{max(slopes[2]):.3f}; simulation {elapsed:.0f} s")
    assert ok


def test_criterion_8_conservation(keystone_run, small_data_run):
    drifts = []
    for frames in (keystone_run, small_data_run[0]):
        c0 = conserved(frames[0])[0]
        drifts.append(max(abs(conserved(f)[0] - c0) for f in frames) / abs(c0))
    ok = max(drifts) <= 1e-6
    record_acceptance(8, ok, "relative drift " + ", ".join(f"{d:.1e}" for d in drifts))
    assert ok
