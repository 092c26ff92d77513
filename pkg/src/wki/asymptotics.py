"""Long-time asymptotics on the y-scale: deformation scalars, the parabolic
cylinder local model and the two-term field.

Conventions.  The reflection coefficient enters the real-line jump as

    M+ = M- [[1, 0], [conj r e^{2p}, 1]] [[1, r e^{-2p}], [0, 1]],   2p = i (z y + z^2 t / phi0^2),

so the phase is stationary at z0 = -y phi0^2 / (2 t).  For t < 0 the factor
e^{-2p} decays in the upper half-plane to the right of z0, and the scalar

    delta(z) = exp(i int_{-inf}^{z0} nu(s) / (s - z) ds),   delta+ = delta- (1 + |r|^2),

removes the middle factor of the left-hand factorisation (M -> M delta^{sigma3}).
Positive times are reduced to negative ones through the conjugate solution
conj q(x, -t), whose scattering data is an explicit mirror of the original.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (AtPoleError, FixedPointDivergence, InputError, IntegrableSingularity, OnCutError,
                     StationaryAtZero, ZeroTime)
from .numerics import (RealGridFunction, _panel_cauchy, _pieces_up_to, beta_phase,
                       cauchy_halfline_integral, complex_gamma, parabolic_cylinder_d)
from .oracle import FieldFrame
from .scattering import SpectralData, exp_d_from_data
from .soliton import (SolitonParams, SpectrumPartition, partition_spectrum, pole_expansion,
                      reconstruct_from_n1, time_phase)

SIGMA3 = np.diag([1.0 + 0j, -1.0 + 0j])
EYE = np.eye(2, dtype=complex)


# --- phase geometry ---------------------------------------------------------

def stationary_point(y: float, t: float, phi0: float) -> float:
    if t == 0:
        raise ZeroTime("the stationary point needs t != 0")
    return -y * phi0 * phi0 / (2.0 * t)


def phase_exponent(z, y: float, t: float, phi0: float):
    """2p(z) = i (z y + z^2 t / phi0^2); r carries e^{-2p}, conj r carries e^{2p}."""
    return time_phase(z, y, t, phi0)


@dataclass(frozen=True)
class PhaseGeometry:
    y: float
    t: float
    phi0: float
    z0: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "z0", stationary_point(self.y, self.t, self.phi0))

    @property
    def sign(self) -> int:
        return 1 if self.t > 0 else -1

    @classmethod
    def from_z0(cls, z0: float, t: float, phi0: float) -> "PhaseGeometry":
        return cls(-2.0 * t * z0 / (phi0 * phi0), t, phi0)


# --- delta and T -------------------------------------------------------------

def _edge_value(nu: RealGridFunction, z0: float, x: float, side: int) -> complex:
    """Boundary value of int_{-inf}^{z0} nu/(s - x) ds from above (side=+1) or below (-1).

    An imaginary part of 1e-300 selects the branch of the closed-form panel logs
    and is otherwise invisible (a signed zero would not survive the subtractions).
    """
    pieces = _pieces_up_to(nu, z0)
    if pieces is None:
        return 0j
    return _panel_cauchy(*pieces, complex(x, 1e-300 if side > 0 else -1e-300))


def _cauchy(nu: RealGridFunction, z0: float, z: complex, side: int = 1) -> complex:
    z = complex(z)
    if z.imag == 0.0 and z.real <= z0:
        return _edge_value(nu, z0, z.real, side)
    return cauchy_halfline_integral(nu, z0, z)


def delta_scalar(z: complex, spec: SpectralData, z0: float, side: int = 1) -> complex:
    """delta(z); on the cut, ``side`` picks the upper (+1) or lower (-1) boundary value."""
    return cmath.exp(1j * _cauchy(spec.nu, z0, z, side))


def delta_log_derivative(z: complex, spec: SpectralData, z0: float, side: int = 1) -> complex:
    """delta'(z)/delta(z) = i int nu/(s - z)^2 = i(-nu(z0)/(z0 - z) + int nu'/(s - z))."""
    nu = spec.nu
    dnu = RealGridFunction(nu.nodes, nu.spline.derivative()(nu.nodes), nu.compact)
    z = complex(z)
    if abs(z - z0) < 1e-12:
        raise AtPoleError("delta' is singular at the stationary point")
    return 1j * (-complex(nu(z0)) / (z0 - z) + _cauchy(dnu, z0, z, side))


def T_eval(z: complex, spec: SpectralData, z0: float, partition: SpectrumPartition | None = None,
           side: int = 0) -> complex:
    """prod over Delta+ of (z - conj z_k)/(z - z_k) times delta(z).

    side = 0 refuses points on the cut; +1 / -1 return the boundary values.
    """
    z = complex(z)
    if side == 0 and abs(z.imag) < 1e-10 and z.real <= z0:
        raise OnCutError(f"z={z} lies on the cut (-inf, {z0}]")
    part = partition or partition_spectrum(spec.eigenvalues, z0)
    out = 1.0 + 0j
    for k in part.delta_plus:
        zk = spec.eigenvalues[k]
        if abs(z - zk) < 1e-12 or abs(z - zk.conjugate()) < 1e-12:
            raise AtPoleError(f"z={z} coincides with a pole of T")
        out *= (z - zk.conjugate()) / (z - zk)
    return out * delta_scalar(z, spec, z0, side or 1)


def T_boundary_values(x: float, spec: SpectralData, z0: float) -> tuple[complex, complex]:
    return T_eval(complex(x, 0.0), spec, z0, side=1), T_eval(complex(x, 0.0), spec, z0, side=-1)


def _nu_integral(nu: RealGridFunction, z0: float) -> float:
    pieces = _pieces_up_to(nu, z0)
    if pieces is None:
        return 0.0
    coef, _, width = pieces
    c0, c1, c2, c3 = coef
    return float(np.sum(c0 * width ** 4 / 4 + c1 * width ** 3 / 3 + c2 * width ** 2 / 2 + c3 * width).real)


def T_large_z_coeff(spec: SpectralData, z0: float) -> complex:
    """Coefficient of 1/z in T(z): i [2 sum_{Delta+} Im z_k - int_{-inf}^{z0} nu]."""
    part = partition_spectrum(spec.eigenvalues, z0)
    heights = sum(spec.eigenvalues[k].imag for k in part.delta_plus)
    return 1j * (2 * heights - _nu_integral(spec.nu, z0))


@dataclass(frozen=True)
class DeformationScalars:
    z0: float
    nu0: float
    T_at_0: complex
    T0_unit: complex
    T1: complex
    partition: SpectrumPartition
    jump_at_0: float = 1.0       # T+(0)/T-(0) when 0 lies on the cut, else 1

    def __post_init__(self):
        if self.nu0 > 0:
            raise InputError("nu(z0) must be non-positive")
        if abs(abs(self.T0_unit) - 1.0) > 1e-10:
            raise InputError("T0 must be unimodular")
        if self.T_at_0 == 0:
            raise InputError("T(0) vanishes")


def T0_and_T1(spec: SpectralData, z0: float) -> DeformationScalars:
    """T0(z0) (unit), T1 = T'(0)/T(0) and T(0).

    With 0 on the cut (z0 > 0) T(0) is the mean of the two boundary values and
    T1 uses the upper one; nu must vanish at 0 there, otherwise nu/s^2 is not
    integrable.
    """
    nu = spec.nu
    part = partition_spectrum(spec.eigenvalues, z0)
    nu0 = float(np.real(nu(z0)))
    unit = cmath.exp(1j * beta_phase(z0, z0, nu))
    for k in part.delta_plus:
        zk = spec.eigenvalues[k]
        unit *= (z0 - zk.conjugate()) / (z0 - zk)
    if z0 == 0.0:
        raise StationaryAtZero("z0 = 0: T(0) sits on the branch point")
    poles = sum(1 / spec.eigenvalues[k] - 1 / spec.eigenvalues[k].conjugate() for k in part.delta_plus)
    if z0 > 0:
        if abs(nu(0.0)) > 1e-10:
            raise IntegrableSingularity("nu(0) != 0 with 0 on the cut: int nu/s^2 diverges")
        up, down = T_boundary_values(0.0, spec, z0)
        t_at_0 = 0.5 * (up + down)
        jump = abs(up / down)
        t1 = poles + delta_log_derivative(0.0, spec, z0, side=1)
    else:
        t_at_0 = T_eval(0.0, spec, z0, part)
        jump = 1.0
        t1 = poles + delta_log_derivative(0.0, spec, z0)
    return DeformationScalars(z0, nu0, complex(t_at_0), complex(unit), complex(t1), part, float(jump))


# --- matched parabolic cylinder data -----------------------------------------

def nu_of(r_abs: float) -> float:
    return -math.log1p(r_abs * r_abs) / (2 * math.pi)


SCALE_READINGS = ("abs", "signed")


def matched_r0(r_at_z0: complex, delta0: complex, nu0: float, t: float, phi0: float, z0: float,
               reading: str = "abs") -> complex:
    """r(z0) delta0^{-2} (sqrt(2|t|)/phi0)^{2 i nu0} e^{i t z0^2 / phi0^2}.

    With lambda = sqrt(2|t|)(z - z0)/phi0 the local jump becomes the constant
    model jump with this coefficient; every extra factor is unimodular.
    ``reading="signed"`` takes sqrt(2t) on the principal branch instead, which
    for t < 0 multiplies the result by e^{-pi nu0}; it exists so the comparison
    harness can tell the two apart.
    """
    if t == 0:
        raise ZeroTime("matched_r0 needs t != 0")
    if reading not in SCALE_READINGS:
        raise InputError(f"reading must be one of {SCALE_READINGS}")
    root = math.sqrt(2 * abs(t)) if reading == "abs" else cmath.sqrt(2 * t)
    scale = cmath.log(root / phi0)
    return complex(r_at_z0 * delta0 ** -2 * cmath.exp(2j * nu0 * scale) * cmath.exp(1j * t * z0 * z0 / phi0 ** 2))


@dataclass(frozen=True)
class PCData:
    """Coefficients of the parabolic cylinder model M = I + m1/lambda + O(lambda^-2).

    m1 = [[0, i beta12], [-i beta21, 0]], so (M - I) i lambda -> [[0, -beta12], [beta21, 0]].
    """
    r0: complex
    nu0: float
    beta12: complex
    beta21: complex
    alpha: complex
    sign: int = -1

    @property
    def m1(self) -> np.ndarray:
        return np.array([[0, 1j * self.beta12], [-1j * self.beta21, 0]], dtype=complex)


def pc_coefficients(r0: complex, nu0: float | None = None, sign: int = -1) -> PCData:
    r0 = complex(r0)
    if r0 == 0:
        return PCData(0j, 0.0, 0j, 0j, 0j, sign)
    nu = nu_of(abs(r0)) if nu0 is None else float(nu0)
    beta21 = (math.sqrt(2 * math.pi) * cmath.exp(1j * math.pi / 4) * math.exp(-math.pi * nu / 2)
              / (r0 * complex_gamma(-1j * nu)))
    beta12 = nu / beta21
    return PCData(r0, nu, complex(beta12), complex(beta21), complex(beta12), sign)


def _psi(lam: complex, pc: PCData, upper: bool) -> np.ndarray:
    """Psi = M_loc X^{sigma3}: constant jump [[1, r0], [conj r0, 1 + |r0|^2]] on the real line."""
    nu = pc.nu0
    if upper:
        a, b = cmath.exp(-0.25j * math.pi), cmath.exp(-0.75j * math.pi)
        ka, kb = math.exp(math.pi * nu / 4), math.exp(-3 * math.pi * nu / 4)
    else:
        a, b = cmath.exp(0.75j * math.pi), cmath.exp(0.25j * math.pi)
        ka, kb = math.exp(-3 * math.pi * nu / 4), math.exp(math.pi * nu / 4)
    p11 = ka * parabolic_cylinder_d(-1j * nu, a * lam)
    p21 = ka * a * (-1j * nu) * parabolic_cylinder_d(-1j * nu - 1, a * lam) / pc.beta12
    p22 = kb * parabolic_cylinder_d(1j * nu, b * lam)
    p12 = kb * b * (1j * nu) * parabolic_cylinder_d(1j * nu - 1, b * lam) / pc.beta21
    return np.array([[p11, p12], [p21, p22]], dtype=complex)


def _x_factor(lam: complex, nu: float, arg: float) -> complex:
    """X = lambda^{-i nu} e^{i lambda^2 / 4} with arg lambda taken as given."""
    log_lam = math.log(abs(lam)) + 1j * arg
    return cmath.exp(-1j * nu * log_lam + 0.25j * lam * lam)


def pc_sector(lam: complex, ray_angle: float = math.pi / 4) -> int:
    """Sectors 0..5 counter-clockwise from the positive real axis, cut by the four rays."""
    arg = cmath.phase(lam)
    if arg < 0 or (arg == 0 and math.copysign(1.0, complex(lam).imag) < 0):
        if arg > -ray_angle or arg == 0:
            return 5
        return 4 if arg > -math.pi + ray_angle else 3
    if arg < ray_angle:
        return 0
    return 1 if arg < math.pi - ray_angle else 2


_SECTOR_ARG = {0: (0.0, True), 1: (None, True), 2: (math.pi, True),
               3: (-math.pi, False), 4: (None, False), 5: (0.0, False)}


def pc_model_matrix(lam: complex, r0, ray_angle: float = math.pi / 4, sector: int | None = None) -> np.ndarray:
    """M^{pc}(lambda): jumps only on the four rays at angles phi, pi - phi, -pi + phi, -phi.

    ``r0`` may be a PCData.  ``sector`` forces the formula of that sector, which
    continues analytically up to its bounding rays.
    """
    pc = r0 if isinstance(r0, PCData) else pc_coefficients(r0)
    lam = complex(lam)
    if lam == 0:
        raise InputError("lambda = 0 is the branch point of the model")
    if pc.r0 == 0:
        return EYE.copy()
    sec = pc_sector(lam, ray_angle) if sector is None else sector
    upper = sec <= 2
    arg = cmath.phase(lam)
    # keep arg continuous inside the two sectors adjacent to the negative axis
    if sec == 2 and arg < 0:
        arg += 2 * math.pi
    if sec == 3 and arg > 0:
        arg -= 2 * math.pi
    X = _x_factor(lam, pc.nu0, arg)
    m = _psi(lam, pc, upper) @ np.diag([1 / X, X])
    r0c, k = pc.r0, 1 + abs(pc.r0) ** 2
    if sec == 0:      # M U^{-1}
        m = m @ np.array([[1, -r0c * X * X], [0, 1]])
    elif sec == 5:    # M L
        m = m @ np.array([[1, 0], [np.conj(r0c) / (X * X), 1]])
    elif sec == 2:    # M L'^{-1}
        m = m @ np.array([[1, 0], [-np.conj(r0c) / (k * X * X), 1]])
    elif sec == 3:    # M U'
        m = m @ np.array([[1, r0c * X * X / k], [0, 1]])
    return m


def pc_ray_jump(lam: complex, pc: PCData, ray: int, ray_angle: float = math.pi / 4) -> np.ndarray:
    """The model jump on ray 1..4 (angles phi, pi - phi, -pi + phi, -phi)."""
    arg = {1: ray_angle, 2: math.pi - ray_angle, 3: -math.pi + ray_angle, 4: -ray_angle}[ray]
    X = _x_factor(lam, pc.nu0, arg)
    r0, k = pc.r0, 1 + abs(pc.r0) ** 2
    if ray == 1:
        return np.array([[1, r0 * X * X], [0, 1]])
    if ray == 2:
        return np.array([[1, 0], [np.conj(r0) / (k * X * X), 1]])
    if ray == 3:
        return np.array([[1, r0 * X * X / k], [0, 1]])
    return np.array([[1, 0], [np.conj(r0) / (X * X), 1]])


# (+ side, - side) sectors of each ray; rays 1 and 4 point away from 0, rays 2 and 3 towards it
_RAY_SIDES = {1: (1, 0), 2: (1, 2), 3: (3, 4), 4: (5, 4)}


def pc_jump_residual(r0: complex, n_points: int = 20, radii=(0.05, 6.0),
                     ray_angle: float = math.pi / 4) -> float:
    """max ||M+ - M- V|| over ``n_points`` per ray and on both real half-lines (V = I there).

    Both sides are evaluated on the contour itself with their sector formulas.
    """
    pc = pc_coefficients(r0)
    angles = {1: ray_angle, 2: math.pi - ray_angle, 3: -math.pi + ray_angle, 4: -ray_angle}
    worst = 0.0
    for ray, (plus, minus) in _RAY_SIDES.items():
        for rho in np.geomspace(*radii, n_points):
            lam = rho * cmath.exp(1j * angles[ray])
            mp = pc_model_matrix(lam, pc, ray_angle, plus)
            mm = pc_model_matrix(lam, pc, ray_angle, minus)
            worst = max(worst, float(np.max(np.abs(mp - mm @ pc_ray_jump(lam, pc, ray, ray_angle)))))
    # the real line carries no jump: this is where the Weber-function data is tested
    for rho in np.geomspace(*radii, n_points):
        for lam, (a, b) in ((complex(rho, 0.0), (0, 5)), (complex(-rho, 0.0), (2, 3))):
            diff = pc_model_matrix(lam, pc, ray_angle, a) - pc_model_matrix(lam, pc, ray_angle, b)
            worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def pc_m1_fit(r0: complex, radius: float = 1e3, directions: Sequence[float] = (math.pi / 2, -math.pi / 2)) -> float:
    """max || (M(lambda) - I) i lambda - i m1 || at |lambda| = radius."""
    pc = pc_coefficients(r0)
    target = 1j * pc.m1
    worst = 0.0
    for a in directions:
        lam = radius * cmath.exp(1j * a)
        worst = max(worst, float(np.max(np.abs((pc_model_matrix(lam, pc) - EYE) * 1j * lam - target))))
    return worst


# --- jump algebra -------------------------------------------------------------

def jump_factorization_residual(r_at_z: complex, z: float, z0: float, spec: SpectralData,
                                phase: complex = 1.0) -> float:
    """Compare T-^{-sigma3} V T+^{sigma3} with its two-factor form on the real line.

    ``phase`` is e^{-2p(z)} (unimodular on the real line).  Right of z0 the
    factors are lower(conj r T^2) upper(r T^-2); left of it
    upper(r T-^-2 / (1+|r|^2)) lower(conj r T+^2 / (1+|r|^2)), which relies on
    T+ = T- (1 + |r|^2) through the computed boundary values.
    """
    if z == z0:
        raise InputError("z must differ from z0")
    r = complex(r_at_z)
    e = complex(phase)
    V = np.array([[1, 0], [np.conj(r) / e, 1]]) @ np.array([[1, r * e], [0, 1]])
    tp, tm = T_boundary_values(z, spec, z0) if z < z0 else (T_eval(z, spec, z0),) * 2
    v1 = np.diag([1 / tm, tm]) @ V @ np.diag([tp, 1 / tp])
    if z > z0:
        t = tp
        fact = np.array([[1, 0], [np.conj(r) * t * t / e, 1]]) @ np.array([[1, r * e / (t * t)], [0, 1]])
    else:
        k = 1 + abs(r) ** 2
        fact = (np.array([[1, r * e / (k * tm * tm)], [0, 1]])
                @ np.array([[1, 0], [np.conj(r) * tp * tp / (k * e), 1]]))
    return float(np.max(np.abs(v1 - fact)))


# --- the error matrix E --------------------------------------------------------

class ELeading(tuple):
    __slots__ = ()
    _fields = ("E0", "E1", "f11", "f12", "f21")

    def __new__(cls, E0, E1, f11, f12, f21):
        return super().__new__(cls, (E0, E1, f11, f12, f21))

    E0 = property(lambda self: self[0])
    E1 = property(lambda self: self[1])
    f11 = property(lambda self: self[2])
    f12 = property(lambda self: self[3])
    f21 = property(lambda self: self[4])


def E_leading(M_sol_at_0, M_sol_at_z0, pc: PCData, z0: float, phi0: float, t: float) -> ELeading:
    """E(z) = I + B/(z - z0), B = phi0/sqrt(2|t|) Msol(z0) m1 Msol(z0)^{-1}.

    Returns E(0), E'(0) and the t-independent entries of
    sqrt|t| Msol(0)^{-1} E(0)^{-1} E'(0) Msol(0).
    """
    if z0 == 0:
        raise StationaryAtZero("z0 = 0: E(0) is evaluated at the stationary point")
    if t == 0:
        raise ZeroTime("E needs t != 0")
    ms0 = np.asarray(M_sol_at_z0, dtype=complex)
    B = phi0 / math.sqrt(2 * abs(t)) * ms0 @ pc.m1 @ np.linalg.inv(ms0)
    E0 = EYE - B / z0
    E1 = -B / (z0 * z0)
    m0 = np.asarray(M_sol_at_0, dtype=complex)
    f = math.sqrt(abs(t)) * np.linalg.inv(m0) @ np.linalg.solve(E0, E1) @ m0
    return ELeading(E0, E1, complex(f[0, 0]), complex(f[0, 1]), complex(f[1, 0]))


# --- the asymptotic field -------------------------------------------------------

def mirror_spectral_data(spec: SpectralData) -> SpectralData:
    """Scattering data of conj(q(x, -t)) in terms of that of q."""
    r = spec.r
    r_m = RealGridFunction(-r.nodes[::-1], -np.conj(r.values[::-1]), r.compact)
    return SpectralData(r_m, tuple(-np.conj(z) for z in spec.eigenvalues),
                        tuple(np.conj(c) for c in spec.norming), spec.phi0,
                        np.conj(spec.q_minus), np.conj(spec.q_plus), np.conj(spec.d))


@dataclass(frozen=True)
class AsymptoticConfig:
    terms: int = 2             # 1: soliton part only, 2: with the parabolic cylinder term
    t_min: float = 10.0
    tol: float = 1e-8          # on y
    max_iter: int = 200
    dy: float = 1e-3           # step of the y-derivative stencil
    zero_r_tol: float = 1e-6   # |r(0)| allowed by the z = 0 expansion
    scale_reading: str = "abs"  # "abs": sqrt(2|t|) in the local scaling; "signed": sqrt(2t)

    def __post_init__(self):
        if self.terms not in (1, 2):
            raise InputError("terms must be 1 or 2")
        if self.scale_reading not in SCALE_READINGS:
            raise InputError(f"scale_reading must be one of {SCALE_READINGS}")


class _Prepared:
    """Quantities of the spectral data that do not depend on (y, t)."""

    def __init__(self, spec: SpectralData, config: AsymptoticConfig):
        self.spec = spec
        self.config = config
        r0 = complex(spec.r(0.0))
        if abs(r0) > config.zero_r_tol:
            raise InputError(f"r(0) = {r0:.3e}: the expansion at z = 0 needs q+ = q-")
        self.dr0 = complex(spec.r.spline.derivative()(0.0))
        self.exp_d = exp_d_from_data(spec)
        self.q_plus = complex(spec.q_plus)
        self.shift = float((np.conj(self.q_plus) * self.exp_d ** 2 * self.dr0).real)
        self.phi0 = float(spec.phi0)


def _n1_at(prep: _Prepared, y: float, t: float) -> np.ndarray:
    """First Taylor coefficient of M(0)^{-1} M(z) at z = 0+ for t < 0."""
    spec, phi0 = prep.spec, prep.phi0
    z0 = stationary_point(y, t, phi0)
    if z0 == 0:
        raise StationaryAtZero("y = 0 puts the stationary point at z = 0")
    zs = spec.eigenvalues
    norming = tuple(c * delta_scalar(z, spec, z0) ** -2 for z, c in zip(zs, spec.norming))
    if zs:
        params = SolitonParams(zs, norming, spec.q_minus, 1.0)
        pe = pole_expansion(params, [y], t)
        jet = pe.zero_jet()
        ms0, ms1 = jet.m0[0], jet.m1[0]
        msz0 = pe(complex(z0))[0]
    else:
        ms0, ms1, msz0 = EYE, np.zeros((2, 2), complex), EYE
    d0 = delta_scalar(0.0, spec, z0, side=1)
    dlog = delta_log_derivative(0.0, spec, z0, side=1)
    inner = np.linalg.solve(ms0, ms1)
    if prep.config.terms == 2:
        nu0 = float(np.real(spec.nu(z0)))
        delta0 = cmath.exp(1j * beta_phase(z0, z0, spec.nu))
        r0 = matched_r0(complex(spec.r(z0)), delta0, nu0, t, phi0, z0, prep.config.scale_reading)
        pc = pc_coefficients(r0, nu0 if r0 != 0 else None)
        e = E_leading(ms0, msz0, pc, z0, phi0, t)
        inner = inner + np.linalg.solve(ms0, np.linalg.solve(e.E0, e.E1) @ ms0)
    # derivative of the lens factor on the upper side of z = 0
    lens = np.zeros((2, 2), complex)
    if z0 < 0:
        lens[0, 1] = prep.dr0 / d0 ** 2
    else:
        k = 1.0  # 1 + |r(0)|^2 with r(0) = 0
        lens[1, 0] = np.conj(prep.dr0) * d0 ** 2 / k
    inner = inner + lens
    dd = np.array([d0, 1 / d0])
    return inner * dd[:, None] / dd[None, :] - dlog * SIGMA3


_STENCIL = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0


def _field_in_y(prep: _Prepared, y: float, t: float):
    h = prep.config.dy
    ns = [_n1_at(prep, y + k * h, t) for k in (-2, -1, 0, 1, 2)]
    dn = sum(w * n for w, n in zip(_STENCIL, ns)) / h
    return reconstruct_from_n1(ns[2], dn, prep.exp_d, prep.q_plus, prep.shift)


def asymptotic_in_y(y: float, t: float, spec: SpectralData, config: AsymptoticConfig | None = None):
    """(q, c_minus, rho) of the asymptotic solution at hodograph coordinate y."""
    config = config or AsymptoticConfig()
    if t == 0:
        raise ZeroTime("asymptotics need t != 0")
    if abs(t) < config.t_min:
        raise InputError(f"|t| = {abs(t)} is below t_min = {config.t_min}")
    if t > 0:
        rec = _field_in_y(_Prepared(mirror_spectral_data(spec), config), y, -t)
        return rec._replace(q=np.conj(rec.q))
    return _field_in_y(_Prepared(spec, config), y, t)


def asymptotic_q(x: float, t: float, spec: SpectralData, config: AsymptoticConfig | None = None) -> complex:
    """Asymptotic field at physical (x, t): solves x = y + c_minus(y) by damped iteration."""
    config = config or AsymptoticConfig()
    if t == 0:
        raise ZeroTime("asymptotics need t != 0")
    if abs(t) < config.t_min:
        raise InputError(f"|t| = {abs(t)} is below t_min = {config.t_min}")
    data, tt = (mirror_spectral_data(spec), -t) if t > 0 else (spec, t)
    prep = _Prepared(data, config)
    y = float(x)
    for _ in range(config.max_iter):
        rec = _field_in_y(prep, y, tt)
        resid = y + float(rec.c_minus) - x
        if abs(resid) < config.tol:
            q = complex(rec.q)
            return q.conjugate() if t > 0 else q
        # dx/dy = rho; cap the step like the soliton inversion
        y -= float(np.clip(resid * rec.rho, -1.0, 1.0))
    raise FixedPointDivergence("y-equation did not converge", where=float(x))


def asymptotic_frame(x_grid, t: float, spec: SpectralData, config: AsymptoticConfig | None = None) -> FieldFrame:
    x = np.asarray(x_grid, dtype=float)
    return FieldFrame(t, x, np.array([asymptotic_q(float(v), t, spec, config) for v in x]))


def deformation_dump(y: float, t: float, spec: SpectralData) -> dict:
    """Debug record of the scalars at (y, t): z0, nu0, T0, T1, r0, beta12, beta21."""
    z0 = stationary_point(y, t, spec.phi0)
    ds = T0_and_T1(spec, z0)
    delta0 = cmath.exp(1j * beta_phase(z0, z0, spec.nu))
    r0 = matched_r0(complex(spec.r(z0)), delta0, ds.nu0, t, spec.phi0, z0)
    pc = pc_coefficients(r0, ds.nu0 if r0 != 0 else None)
    pair = lambda c: [complex(c).real, complex(c).imag]
    return {"z0": z0, "nu0": ds.nu0, "T0": pair(ds.T0_unit), "T1": pair(ds.T1),
            "r0": pair(r0), "beta12": pair(pc.beta12), "beta21": pair(pc.beta21)}
