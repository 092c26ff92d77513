"""Special functions and quadrature primitives.

Everything here is a pure function of its arguments.  Complex scalars are
plain Python/numpy complex numbers; sampled functions on the real line are
carried by :class:`RealGridFunction`, which owns a cubic-spline interpolant
used by the Cauchy-type integrals.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConvergenceError, OnCutError, PoleError, TruncationError

POLE_TOL = 1e-12
CUT_TOL = 1e-10
EDGE_TOL = 1e-10

# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _near_pole(z: complex) -> bool:
    if abs(z.imag) > POLE_TOL or z.real > POLE_TOL:
        return False
    return abs(z.real - round(z.real)) <= POLE_TOL


def _lanczos(z: complex) -> complex:
    # valid for Re z >= 1/2
    z = z - 1.0
    acc = _LANCZOS[0]
    for k in range(1, len(_LANCZOS)):
        acc += _LANCZOS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _SQRT_2PI * cmath.exp((z + 0.5) * cmath.log(t) - t) * acc


def complex_gamma(z: complex) -> complex:
    """Gamma function for complex argument (Lanczos + reflection)."""
    z = complex(z)
    if _near_pole(z):
        raise PoleError(f"gamma has a pole at {z}")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * _lanczos(1.0 - z))
    return _lanczos(z)


def reciprocal_gamma(z: complex) -> complex:
    """1/Gamma(z), entire; exactly zero at the poles of Gamma."""
    z = complex(z)
    if _near_pole(z):
        return 0.0j
    return 1.0 / complex_gamma(z)


def _nonpositive_integer(x: complex) -> bool:
    return abs(x.imag) < 1e-14 and x.real < 0.5 and abs(x.real - round(x.real)) < 1e-14


def _kummer_series(a: complex, b: complex, z: complex, max_terms: int = 2000) -> tuple[complex, complex]:
    """Direct power series for M(a,b,z) and its z-derivative."""
    term = 1.0 + 0j
    total = term
    dtotal = 0j
    small = 0
    for n in range(max_terms):
        # d/dz of term_{n+1} z^{n+1} is (n+1) term_{n+1} z^n
        term = term * (a + n) / (b + n) * z / (n + 1)
        total += term
        if z != 0:
            dtotal += term * (n + 1) / z
        if abs(term) <= 1e-17 * max(abs(total), 1e-300):
            small += 1
            if small >= 3:
                if z == 0:
                    dtotal = a / b
                return total, dtotal
        else:
            small = 0
    raise ConvergenceError(f"Kummer series did not converge for a={a}, b={b}, z={z}")


def _taylor_step(coeff_next: Callable[[int, list], complex], v0: complex, v1: complex,
                 max_terms: int = 400) -> tuple[complex, complex]:
    """Sum a scaled Taylor series v_n = w_n h^n given its recurrence.

    Returns (w(c+h), h*w'(c+h)).
    """
    v = [v0, v1]
    total = v0 + v1
    dtotal = v1
    small = 0
    for n in range(max_terms):
        vn = coeff_next(n, v)
        v.append(vn)
        total += vn
        dtotal += (n + 2) * vn
        if abs(vn) <= 1e-18 * max(abs(total), abs(dtotal), 1e-300):
            small += 1
            if small >= 4:
                return total, dtotal
        else:
            small = 0
    raise ConvergenceError("Taylor continuation step did not converge")


def _kummer_continue(a: complex, b: complex, z_start: complex, w: complex, dw: complex,
                     z_end: complex) -> tuple[complex, complex]:
    """Carry (M, M') along the segment z_start -> z_end with local Taylor steps."""
    c = z_start
    while True:
        remaining = z_end - c
        if abs(remaining) < 1e-15:
            return w, dw
        hmax = abs(c) / 3.0
        h = remaining if abs(remaining) <= hmax else remaining * (hmax / abs(remaining))

        def nxt(n, v, c=c, h=h):
            return (-(n + 1) * (n + b - c) * h * v[n + 1] + (n + a) * h * h * v[n]) / (c * (n + 2) * (n + 1))

        w, hdw = _taylor_step(nxt, w, dw * h)
        dw = hdw / h
        c = c + h


def kummer_m(a: complex, b: complex, z: complex) -> complex:
    """Confluent hypergeometric function M(a, b, z) = 1F1(a; b; z)."""
    a, b, z = complex(a), complex(b), complex(z)
    if _nonpositive_integer(b):
        raise PoleError(f"M(a,b,z) undefined for b={b}")
    if z == 0:
        return 1.0 + 0j
    if _nonpositive_integer(a):
        # terminating series, exact
        total, term = 1.0 + 0j, 1.0 + 0j
        for n in range(int(round(-a.real))):
            term = term * (a + n) / (b + n) * z / (n + 1)
            total += term
        return total
    if z.real < 0:
        return cmath.exp(z) * kummer_m(b - a, b, -z)
    if abs(z) <= 4.0:
        return _kummer_series(a, b, z)[0]
    z1 = 2.0 * z / abs(z)
    m1, dm1 = _kummer_series(a, b, z1)
    return _kummer_continue(a, b, z1, m1, dm1, z)[0]


# parabolic cylinder functions (standard Weber convention D'' + (a + 1/2 - z^2/4) D = 0)

PCF_SERIES_RADIUS = 2.5
PCF_ASYMPTOTIC_RADIUS = 9.0


def _pcf_kummer(a: complex, z: complex) -> complex:
    w = z * z / 2.0
    first = math.sqrt(math.pi) * reciprocal_gamma((1.0 - a) / 2.0) * kummer_m(-a / 2.0, 0.5, w)
    second = _SQRT_2PI * z * reciprocal_gamma(-a / 2.0) * kummer_m((1.0 - a) / 2.0, 1.5, w)
    return 2.0 ** (a / 2.0) * cmath.exp(-z * z / 4.0) * (first - second)


def _asym_sum(a: complex, z: complex, sign: int) -> complex:
    """Sum_{n} of the formal series in 1/z^2 for D_a, truncated at its smallest term.

    sign=+1 gives 1 - a(a-1)/(2z^2) + ..., sign=-1 gives 1 + (a+1)(a+2)/(2z^2) + ...
    """
    z2 = z * z
    term = 1.0 + 0j
    total = term
    prev = abs(term)
    for n in range(200):
        if sign > 0:
            term = term * (-(a - 2 * n) * (a - 2 * n - 1)) / (2 * (n + 1) * z2)
        else:
            term = term * ((a + 2 * n + 1) * (a + 2 * n + 2)) / (2 * (n + 1) * z2)
        if abs(term) > prev:
            break
        total += term
        prev = abs(term)
        if prev < 1e-18 * abs(total):
            break
    return total


def _pcf_asymptotic(a: complex, z: complex) -> complex:
    val = cmath.exp(a * cmath.log(z) - z * z / 4.0) * _asym_sum(a, z, +1)
    arg = cmath.phase(z)
    # the recessive companion switches on across the Stokes line |ph z| = pi/2,
    # where it is smaller than the truncation error of the leading series
    if abs(arg) > math.pi / 2:
        rg = reciprocal_gamma(-a)
        if rg != 0:
            rot = cmath.exp(1j * math.pi * a) if arg > 0 else cmath.exp(-1j * math.pi * a)
            val -= (_SQRT_2PI * rg * rot * cmath.exp(-(a + 1.0) * cmath.log(z) + z * z / 4.0)
                    * _asym_sum(a, z, -1))
    return val


def _weber_continue(a: complex, z_start: complex, w: complex, dw: complex, z_end: complex,
                    step: float = 0.25) -> tuple[complex, complex]:
    c = z_start
    e = a + 0.5
    while True:
        remaining = z_end - c
        if abs(remaining) < 1e-15:
            return w, dw
        h = remaining if abs(remaining) <= step else remaining * (step / abs(remaining))
        q0 = c * c / 4.0 - e

        def nxt(n, v, c=c, h=h, q0=q0):
            # (n+2)(n+1) w_{n+2} = q0 w_n + (c/2) w_{n-1} + (1/4) w_{n-2}
            acc = q0 * h * h * v[n]
            if n >= 1:
                acc += 0.5 * c * h ** 3 * v[n - 1]
            if n >= 2:
                acc += 0.25 * h ** 4 * v[n - 2]
            return acc / ((n + 2) * (n + 1))

        w, hdw = _taylor_step(nxt, w, dw * h)
        dw = hdw / h
        c = c + h


def parabolic_cylinder_d(a: complex, z: complex) -> complex:
    """Weber parabolic cylinder function D_a(z), principal branches.

    Small |z| uses the two-Kummer representation, large |z| the asymptotic
    expansion with its Stokes companion, and the annulus in between is bridged
    by Taylor continuation of the Weber equation in the numerically stable
    direction (inward where D_a is recessive, outward elsewhere).
    """
    a, z = complex(a), complex(z)
    r = abs(z)
    if r <= PCF_SERIES_RADIUS:
        return _pcf_kummer(a, z)
    if r >= PCF_ASYMPTOTIC_RADIUS:
        return _pcf_asymptotic(a, z)
    direction = z / r
    if abs(cmath.phase(z)) < math.pi / 4:
        zs = PCF_ASYMPTOTIC_RADIUS * direction
        w = _pcf_asymptotic(a, zs)
        dw = zs / 2.0 * w - _pcf_asymptotic(a + 1.0, zs)
        return _weber_continue(a, zs, w, dw, z)[0]
    w0 = 2.0 ** (a / 2.0) * math.sqrt(math.pi) * reciprocal_gamma((1.0 - a) / 2.0)
    dw0 = -(2.0 ** ((a + 1.0) / 2.0)) * math.sqrt(math.pi) * reciprocal_gamma(-a / 2.0)
    return _weber_continue(a, 0j, w0, dw0, z)[0]


# quadrature

@dataclass(frozen=True)
class RealGridFunction:
    """Samples of a (complex-valued) function on an ascending real grid."""

    nodes: np.ndarray
    values: np.ndarray
    # True when the function is exactly zero off the grid (no decay check needed)
    compact: bool = False
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("a grid function needs at least two nodes")
        if values.shape != nodes.shape:
            raise ValueError("nodes and values must have equal length")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    @cached_property
    def spline(self) -> CubicSpline:
        return CubicSpline(self.nodes, self.values)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        out = np.where((s < self.nodes[0]) | (s > self.nodes[-1]), 0.0, self.spline(s))
        return out if out.ndim else out[()]

    def map(self, fn) -> "RealGridFunction":
        return RealGridFunction(self.nodes, fn(self.values), self.compact)


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def gauss_legendre(integrand: Callable, a: float, b: float, panels: int = 1, order: int = 16) -> complex:
    """Composite Gauss-Legendre rule on equal panels of [a, b].

    ``integrand`` must accept a numpy array of abscissae.
    """
    if not a < b:
        raise ValueError("need a < b")
    if order < 2:
        raise ValueError("order must be at least 2")
    t, w = _gl_rule(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    s = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    vals = np.asarray(integrand(s)).reshape(panels, order)
    total = np.sum(half[:, None] * w[None, :] * vals)
    return complex(total) if np.iscomplexobj(total) else float(total)


def _panel_cauchy(coef: np.ndarray, left: np.ndarray, width: np.ndarray, z: complex,
                  order: int = 16) -> complex:
    """Sum over panels of int_0^width P(u) / (u - w) du, w = z - left.

    P(u) = c0 u^3 + c1 u^2 + c2 u + c3 (scipy PPoly layout).  Panels close to z
    are integrated in closed form, the rest by Gauss-Legendre.
    """
    c0, c1, c2, c3 = coef
    w = z - left
    h = width
    near = np.abs(w - 0.5 * h) < 1.5 * h
    total = 0j
    if np.any(near):
        wn, hn = w[near], h[near]
        a0, a1, a2, a3 = c0[near], c1[near], c2[near], c3[near]
        pw = ((a0 * wn + a1) * wn + a2) * wn + a3
        qint = (a0 * (hn ** 3 / 3 + hn ** 2 * wn / 2 + wn ** 2 * hn)
                + a1 * (hn ** 2 / 2 + wn * hn) + a2 * hn)
        # both logs built as (x - w) so a signed-zero imaginary part picks the same branch
        right_arg = (hn - wn).astype(complex)
        left_arg = (0.0 - wn).astype(complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.log(right_arg) - np.log(left_arg)
        # an endpoint coinciding with z only occurs where P vanishes there (subtracted integrands)
        with np.errstate(invalid="ignore"):
            pw_logs = np.where(np.isfinite(logs), pw * logs, 0.0)
        total += np.sum(pw_logs + qint)
    far = ~near
    if np.any(far):
        t, wt = _gl_rule(order)
        hf = h[far]
        u = 0.5 * hf[:, None] * (1.0 + t[None, :])
        p = ((c0[far, None] * u + c1[far, None]) * u + c2[far, None]) * u + c3[far, None]
        total += np.sum(0.5 * hf[:, None] * wt[None, :] * p / (u - w[far, None]))
    return complex(total)


def _pieces_up_to(f: RealGridFunction, upper: float, lower: float = -np.inf):
    """Spline pieces restricted to [lower, upper] as (coef, left, width)."""
    sp = f.spline
    x = sp.x
    lo = max(lower, x[0])
    hi = min(upper, x[-1])
    if hi <= lo:
        return None
    i0 = max(int(np.searchsorted(x, lo, side="right")) - 1, 0)
    i1 = min(int(np.searchsorted(x, hi, side="left")), len(x) - 1)
    idx = np.arange(i0, i1)
    left = x[idx].astype(float)
    right = x[idx + 1].astype(float)
    coef = sp.c[:, idx].astype(complex)
    # shift polynomials whose panel starts inside (lower cut)
    if left[0] < lo:
        coef[:, 0] = _shift_cubic(coef[:, 0], lo - left[0])
        left[0] = lo
    right[-1] = min(right[-1], hi)
    return coef, left, right - left


def _shift_cubic(c: np.ndarray, d: float) -> np.ndarray:
    """Coefficients of P(u + d) in the same (c0 u^3 + ... + c3) layout."""
    c0, c1, c2, c3 = c
    return np.array([
        c0,
        3 * c0 * d + c1,
        3 * c0 * d * d + 2 * c1 * d + c2,
        ((c0 * d + c1) * d + c2) * d + c3,
    ])


def _check_left_edge(nu: RealGridFunction):
    if not nu.compact and abs(nu.values[0]) > EDGE_TOL:
        raise TruncationError(f"grid function not decayed at left edge (|value|={abs(nu.values[0]):.3e})")


def cauchy_halfline_integral(nu: RealGridFunction, z0: float, z: complex) -> complex:
    """int_{-inf}^{z0} nu(s) / (s - z) ds for the spline interpolant of ``nu``.

    ``nu`` is taken as zero outside its grid; z0 = +inf integrates the whole grid.
    """
    z = complex(z)
    _check_left_edge(nu)
    if np.isfinite(z0):
        if z.real <= z0 + CUT_TOL and abs(z.imag) < CUT_TOL:
            raise OnCutError(f"z={z} lies on the cut (-inf, {z0}]")
    elif abs(z.imag) < CUT_TOL:
        raise OnCutError(f"z={z} lies on the real line")
    pieces = _pieces_up_to(nu, z0)
    if pieces is None:
        return 0j
    return _panel_cauchy(*pieces, z)


def beta_phase(z: complex, z0: float, nu: RealGridFunction) -> complex:
    """-nu(z0) log(z - z0 + 1) + int_{-inf}^{z0} (nu(s) - chi(s) nu(z0)) / (s - z) ds.

    chi is the indicator of (z0 - 1, z0).  The subtraction makes the integrand
    regular at s = z0, so z = z0 itself is admissible.
    """
    z = complex(z)
    _check_left_edge(nu)
    if abs(z.imag) < CUT_TOL and z.real < z0 - CUT_TOL:
        raise OnCutError(f"z={z} lies on the cut (-inf, {z0})")
    nu0 = complex(nu(z0))
    total = -nu0 * cmath.log(z - z0 + 1.0)
    far = _pieces_up_to(nu, z0 - 1.0)
    if far is not None:
        total += _panel_cauchy(*far, z)
    near = _pieces_up_to(nu, z0, lower=z0 - 1.0)
    if near is not None:
        coef, left, width = near
        coef = coef.copy()
        coef[3] -= nu0
        total += _panel_cauchy(coef, left, width, z)
    if z0 - 1.0 < nu.nodes[0]:
        # chi extends past the grid where nu is zero: -nu0 int ds/(s - z) there
        a, b = z0 - 1.0, min(nu.nodes[0], z0)
        total -= nu0 * (cmath.log(b - z) - cmath.log(a - z))
    if z0 > nu.nodes[-1]:
        a, b = max(nu.nodes[-1], z0 - 1.0), z0
        total -= nu0 * (cmath.log(b - z) - cmath.log(a - z))
    return total


def nu_from_reflection(r: RealGridFunction) -> RealGridFunction:
    """nu(s) = -(1/2pi) log(1 + |r(s)|^2) on the same grid."""
    return RealGridFunction(r.nodes, -np.log1p(np.abs(r.values) ** 2) / (2 * np.pi), r.compact)
