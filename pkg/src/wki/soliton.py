"""Reflectionless Riemann-Hilbert engine.

The matrix M(z) solved here has simple poles at the eigenvalues z_j and their
conjugates and no jump on the real line.  Writing

    M(z) = I + sum_j [ alpha_j e2^T / (z - z_j) + beta_j e1^T / (z - conj z_j) ]

(alpha_j fills the second column, beta_j the first), the residue conditions

    Res_{z_j} M      = C_j      * (first column of M at z_j)   in column two
    Res_{conj z_j} M = -conj C_j * (second column at conj z_j)  in column one

with C_j = c_j exp(-i (z_j y + z_j^2 t / phi0^2)) become a 2N x 2N linear
system.  Its y-derivative is linear in the same matrix, so the field and the
hodograph shift come out in closed form from the Taylor data of M at z = 0.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (FixedPointDivergence, InputError, SingularProfile, SingularSystem,
                     TruncationError)
from .numerics import RealGridFunction, cauchy_halfline_integral
from .oracle import FieldFrame


def background_phi(q_amp: float) -> float:
    return math.sqrt(1.0 + q_amp * q_amp)


def time_phase(z, y, t, phi0):
    """Exponent i(z y + z^2 t / phi0^2); the residue weight is exp(-phase)."""
    return 1j * (z * y + z * z * t / (phi0 * phi0))


@dataclass(frozen=True)
class SolitonParams:
    """Discrete scattering data on a constant background.

    ``exp_d`` is e^d.  When omitted it is fixed by the spectrum: for
    reflectionless data e^d = prod z_j / conj(z_j).
    """
    eigenvalues: tuple
    norming: tuple
    q_minus: complex = 0.0
    exp_d: complex | None = None

    def __post_init__(self):
        zs = tuple(complex(z) for z in np.atleast_1d(self.eigenvalues))
        cs = tuple(complex(c) for c in np.atleast_1d(self.norming))
        if len(zs) != len(cs):
            raise InputError("eigenvalues and norming constants differ in length")
        for z in zs:
            if z.imag < 1e-6:
                raise InputError(f"eigenvalue {z} is not in the upper half-plane")
        for c in cs:
            if c == 0:
                raise InputError("norming constants must be nonzero")
        for i in range(len(zs)):
            for j in range(i):
                if abs(zs[i] - zs[j]) < 1e-8:
                    raise InputError("eigenvalues must be distinct")
        object.__setattr__(self, "eigenvalues", zs)
        object.__setattr__(self, "norming", cs)
        object.__setattr__(self, "q_minus", complex(self.q_minus))

    @classmethod
    def single(cls, z, c, q_minus=0.0, exp_d=None) -> "SolitonParams":
        return cls((z,), (c,), q_minus, exp_d)

    @property
    def size(self) -> int:
        return len(self.eigenvalues)

    @property
    def q_amp(self) -> float:
        return abs(self.q_minus)

    @property
    def phi0(self) -> float:
        return background_phi(self.q_amp)

    @property
    def exp_d_value(self) -> complex:
        if self.exp_d is not None:
            return complex(self.exp_d)
        out = 1.0 + 0j
        for z in self.eigenvalues:
            out *= z / z.conjugate()
        return out


# --- residue linear system -------------------------------------------------

def _weights(params: SolitonParams, y, t):
    zs = np.asarray(params.eigenvalues)
    cs = np.asarray(params.norming)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    w = cs[None, :] * np.exp(-time_phase(zs[None, :], y[:, None], t, params.phi0))
    return zs, w, -1j * zs[None, :] * w


def _solve_batch(zs, w, dw):
    """Solve the residue system for a batch of weights (rows of ``w``).

    Rows with |C_j| > 1 are divided by C_j so that exponentially large
    weights (poles far on the growing side of the phase) stay well scaled.
    """
    n = len(zs)
    batch = w.shape[0]
    K = 1.0 / (zs[:, None] - np.conj(zs)[None, :])      # 1/(z_j - conj z_k)
    Kc = 1.0 / (np.conj(zs)[:, None] - zs[None, :])     # 1/(conj z_j - z_k)
    eye = np.eye(n)
    L = np.zeros((batch, 2 * n, 2 * n), complex)
    dL = np.zeros_like(L)
    R = np.zeros((batch, 2 * n, 2), complex)
    dR = np.zeros_like(R)
    wc, dwc = np.conj(w), np.conj(dw)
    L[:, :n, :n] = eye
    L[:, n:, n:] = eye
    L[:, :n, n:] = -w[:, :, None] * K
    L[:, n:, :n] = wc[:, :, None] * Kc
    dL[:, :n, n:] = -dw[:, :, None] * K
    dL[:, n:, :n] = dwc[:, :, None] * Kc
    R[:, :n, 0] = w
    R[:, n:, 1] = -wc
    dR[:, :n, 0] = dw
    dR[:, n:, 1] = -dwc
    scale = np.ones((batch, 2 * n), complex)
    big = np.abs(w) > 1.0
    s = np.where(big, 1.0 / np.where(big, w, 1.0), 1.0)
    scale[:, :n] = s
    scale[:, n:] = np.conj(s)
    Ls, Rs = L * scale[:, :, None], R * scale[:, :, None]
    cond = np.linalg.cond(Ls)
    if not np.all(np.isfinite(cond)) or np.any(cond > 1e13):
        raise SingularSystem("residue system is numerically singular")
    X = np.linalg.solve(Ls, Rs)
    rhs = (dR - dL @ X) * scale[:, :, None]
    dX = np.linalg.solve(Ls, rhs)
    return X, dX


class ZeroJet(NamedTuple):
    """Taylor data of M at z = 0: M(0), M'(0) and their y-derivatives."""
    m0: np.ndarray
    m1: np.ndarray
    dm0: np.ndarray
    dm1: np.ndarray


@dataclass(frozen=True)
class PoleExpansion:
    """Partial-fraction solution for a batch of y values at fixed t."""
    eigenvalues: np.ndarray
    alpha: np.ndarray      # (batch, N, 2): second-column residues at z_j
    beta: np.ndarray       # (batch, N, 2): first-column residues at conj z_j
    dalpha: np.ndarray
    dbeta: np.ndarray

    def __call__(self, z: complex) -> np.ndarray:
        """M(z) for every batch member, shape (batch, 2, 2)."""
        zs = self.eigenvalues
        batch = self.alpha.shape[0]
        out = np.zeros((batch, 2, 2), complex)
        out[:, 0, 0] = out[:, 1, 1] = 1.0
        if len(zs):
            out[:, :, 1] += np.einsum("bjk,j->bk", self.alpha, 1.0 / (z - zs))
            out[:, :, 0] += np.einsum("bjk,j->bk", self.beta, 1.0 / (z - np.conj(zs)))
        return out

    def zero_jet(self) -> ZeroJet:
        zs = self.eigenvalues
        zb = np.conj(zs)
        batch = self.alpha.shape[0]
        eye = np.broadcast_to(np.eye(2, dtype=complex), (batch, 2, 2))

        def parts(a, b):
            m0 = np.zeros((batch, 2, 2), complex)
            m1 = np.zeros((batch, 2, 2), complex)
            if len(zs):
                m0[:, :, 1] = -np.einsum("bjk,j->bk", a, 1.0 / zs)
                m0[:, :, 0] = -np.einsum("bjk,j->bk", b, 1.0 / zb)
                m1[:, :, 1] = -np.einsum("bjk,j->bk", a, 1.0 / zs**2)
                m1[:, :, 0] = -np.einsum("bjk,j->bk", b, 1.0 / zb**2)
            return m0, m1

        m0, m1 = parts(self.alpha, self.beta)
        dm0, dm1 = parts(self.dalpha, self.dbeta)
        return ZeroJet(m0 + eye, m1, dm0, dm1)


def pole_expansion(params: SolitonParams, y, t: float) -> PoleExpansion:
    zs, w, dw = _weights(params, y, t)
    batch = w.shape[0]
    n = len(zs)
    if n == 0:
        empty = np.zeros((batch, 0, 2), complex)
        return PoleExpansion(zs, empty, empty, empty, empty)
    X, dX = _solve_batch(zs, w, dw)
    return PoleExpansion(zs, X[:, :n], X[:, n:], dX[:, :n], dX[:, n:])


# --- spec-level operations -------------------------------------------------

@dataclass(frozen=True)
class SolitonMatrix:
    z: complex
    entries: np.ndarray
    alpha: complex
    beta: complex
    poles: tuple


def one_soliton_matrix(params: SolitonParams, y: float, t: float, z: complex) -> SolitonMatrix:
    """Closed-form single-pole solution.

    M = I + [[0, alpha],[0, beta]]/(z - z1) + [[conj beta, 0],[-conj alpha, 0]]/(z - conj z1)
    with alpha = 4 eta^2 C / (4 eta^2 + |C|^2), beta = -C conj(alpha) / (2 i eta).
    """
    if params.size != 1:
        raise InputError("one_soliton_matrix needs exactly one eigenvalue")
    z1 = params.eigenvalues[0]
    if abs(z - z1) < 1e-14 or abs(z - z1.conjugate()) < 1e-14:
        raise SingularSystem("evaluation point coincides with a pole")
    C = params.norming[0] * cmath.exp(-time_phase(z1, y, t, params.phi0))
    eta = z1.imag
    denom = 4 * eta * eta + abs(C) ** 2
    assert denom > 0.0
    alpha = 4 * eta * eta * C / denom
    beta = -C * alpha.conjugate() / (2j * eta)
    m = np.eye(2, dtype=complex)
    m[0, 1] += alpha / (z - z1)
    m[1, 1] += beta / (z - z1)
    m[0, 0] += beta.conjugate() / (z - z1.conjugate())
    m[1, 0] += -alpha.conjugate() / (z - z1.conjugate())
    return SolitonMatrix(z, m, alpha, beta, (z1, z1.conjugate()))


def nsoliton_matrix(params: SolitonParams, y: float, t: float, z: complex) -> np.ndarray:
    for zj in params.eigenvalues:
        if abs(z - zj) < 1e-14 or abs(z - zj.conjugate()) < 1e-14:
            raise SingularSystem("evaluation point coincides with a pole")
    return pole_expansion(params, y, t)(z)[0]


def residue_defect(params: SolitonParams, y: float, t: float, h: float = 1e-7) -> float:
    """Largest violation of the residue conditions (both poles, both columns).

    Residues come straight from the coefficients; the regular column at each
    pole is evaluated by removing the singular term.
    """
    exp_ = pole_expansion(params, y, t)
    zs = exp_.eigenvalues
    worst = 0.0
    for j, zj in enumerate(zs):
        C = params.norming[j] * cmath.exp(-time_phase(zj, y, t, params.phi0))
        col1 = np.array([1, 0], complex) + sum(exp_.beta[0, k] / (zj - np.conj(zk)) for k, zk in enumerate(zs))
        worst = max(worst, np.max(np.abs(exp_.alpha[0, j] - C * col1)))
        col2 = np.array([0, 1], complex) + sum(exp_.alpha[0, k] / (np.conj(zj) - zk) for k, zk in enumerate(zs))
        worst = max(worst, np.max(np.abs(exp_.beta[0, j] + np.conj(C) * col2)))
    return float(worst)


class Reconstruction(NamedTuple):
    q: np.ndarray
    c_minus: np.ndarray
    rho: np.ndarray          # Phi / phi0 = dy/dx


def boundary_gauge(q_plus: complex) -> np.ndarray:
    """G(q) = s [[1, a], [b, 1]] at the boundary value; G sigma3 G^{-1} = [[1, i q], [-i conj q, -1]] / Phi."""
    phi = math.sqrt(1.0 + abs(q_plus) ** 2)
    s = math.sqrt((phi + 1) / (2 * phi))
    a = -1j * q_plus / (phi + 1)
    b = -1j * np.conj(q_plus) / (phi + 1)
    return s * np.array([[1, a], [b, 1]])


def reconstruct_from_n1(n1, dn1, exp_d: complex, q_plus: complex, shift: float = 0.0) -> Reconstruction:
    """Field from the first Taylor coefficient N1 of N(z) = M(0)^{-1} M(z) and its y-derivative.

    With W = G+ e^{d sigma3} N1 e^{-d sigma3} G+^{-1}:
        1/Phi = 1/phi0 + 2i dW11/dy,   q/Phi = q+/phi0 + 2 dW12/dy,   c_minus = 2i phi0 W11 + shift.
    ``shift`` is zero for reflectionless data; on the real-line problem it is
    conj(q+) e^{2d} r'(0).
    """
    phi0 = math.sqrt(1.0 + abs(q_plus) ** 2)
    g = boundary_gauge(q_plus)
    gi = np.linalg.inv(g)
    dd = np.array([exp_d, 1.0 / exp_d])
    conj = lambda a: g @ (a * dd[:, None] / dd[None, :]) @ gi
    w, dw = conj(np.asarray(n1)), conj(np.asarray(dn1))
    inv_phi = 1.0 / phi0 + 2j * dw[..., 0, 0]
    phi = 1.0 / inv_phi.real
    q = (q_plus / phi0 + 2 * dw[..., 0, 1]) * phi
    c_minus = (2j * phi0 * w[..., 0, 0]).real + shift
    return Reconstruction(q, c_minus, phi / phi0)


def reconstruct_q(jet: ZeroJet, exp_d: complex, q_plus: complex, phi0: float | None = None) -> Reconstruction:
    """Field, hodograph shift and stretch from the z = 0 Taylor data of M."""
    m0inv = np.linalg.inv(jet.m0)
    n1 = m0inv @ jet.m1
    dn1 = -m0inv @ jet.dm0 @ m0inv @ jet.m1 + m0inv @ jet.dm1
    return reconstruct_from_n1(n1, dn1, exp_d, q_plus)


def soliton_in_y(params: SolitonParams, y, t: float) -> Reconstruction:
    jet = pole_expansion(params, y, t).zero_jet()
    return reconstruct_q(jet, params.exp_d_value, params.q_minus)


def soliton_field(params: SolitonParams, x_grid, t: float, tol: float = 1e-10,
                  max_iter: int = 200) -> FieldFrame:
    """Evaluate the field on a physical grid by inverting x = y + c_minus(y).

    Newton steps use dx/dy = 1/rho; each step is capped at one unit so a bad
    start cannot jump across the soliton core.
    """
    x = np.asarray(x_grid, dtype=float)
    y = x.copy()
    rec = soliton_in_y(params, y, t)
    y = x - rec.c_minus
    for _ in range(max_iter):
        rec = soliton_in_y(params, y, t)
        if np.any(rec.rho <= 0):
            bad = x[np.argmin(rec.rho)]
            raise SingularProfile(f"hodograph not monotone near x = {bad:.6g}")
        resid = y + rec.c_minus - x
        if np.max(np.abs(resid)) < tol:
            return FieldFrame(t, x, np.asarray(rec.q, complex))
        y = y - np.clip(resid * rec.rho, -1.0, 1.0)
    worst = int(np.argmax(np.abs(resid)))
    raise FixedPointDivergence("hodograph inversion did not converge", where=float(x[worst]))


def min_stretch(params: SolitonParams, t: float, y_span=(-30.0, 30.0), n: int = 2001) -> float:
    """Smallest rho over a y window; non-positive values signal a loop profile."""
    ys = np.linspace(*y_span, n)
    return float(np.min(soliton_in_y(params, ys, t).rho))


# --- deformation helpers used by the long-time analysis ----------------------

@dataclass(frozen=True)
class SpectrumPartition:
    delta_plus: tuple
    delta_minus: tuple
    z_in_I: tuple
    z_left_I: tuple
    z_right_I: tuple
    z0: float
    rho: float


def partition_spectrum(eigenvalues: Sequence[complex], z0: float) -> SpectrumPartition:
    """Split indices by Re z_k against z0; ties go to the plus set."""
    zs = [complex(z) for z in eigenvalues]
    for i in range(len(zs)):
        for j in range(i):
            if abs(zs[i] - zs[j]) < 1e-8:
                raise InputError("eigenvalues must be distinct")
    plus = tuple(k for k, z in enumerate(zs) if z.real >= z0)
    minus = tuple(k for k, z in enumerate(zs) if z.real < z0)
    gaps = [abs(zs[i] - zs[j]) for i in range(len(zs)) for j in range(i)]
    heights = [z.imag for z in zs]
    rho = 0.5 * min(gaps + heights) if zs else math.inf
    inside = tuple(k for k, z in enumerate(zs) if abs(z.real - z0) < rho)
    left = tuple(k for k, z in enumerate(zs) if z.real <= z0 - rho)
    right = tuple(k for k, z in enumerate(zs) if z.real >= z0 + rho)
    return SpectrumPartition(plus, minus, inside, left, right, float(z0), float(rho))


def _mirror(f: RealGridFunction) -> RealGridFunction:
    return RealGridFunction(-f.nodes[::-1], f.values[::-1], compact=f.compact)


def halfline_cauchy(weight: RealGridFunction, z0: float, z: complex, side: str) -> complex:
    """Integral of weight(s)/(s - z) over (-inf, z0) for side 'left' or (z0, inf) for 'right'."""
    if side == "left":
        return cauchy_halfline_integral(weight, z0, z)
    if side == "right":
        # s -> -s maps (z0, inf) onto (-inf, -z0)
        return -cauchy_halfline_integral(_mirror(weight), -z0, -z)
    raise InputError(f"unknown side {side!r}")


def modify_norming(c_j: complex, r: RealGridFunction, z0: float, z_j: complex,
                   side: str = "right") -> complex:
    """Norming constant after conjugation by delta^{sigma3}.

    delta(z) = exp(i int nu/(s - z)) over the chosen half-line, and the residue
    weight picks up delta(z_j)^{-2}, i.e. c exp((i/pi) int log(1+|r|^2)/(s - z_j) ds).
    """
    if abs(z_j.imag) < 1e-12:
        raise InputError("z_j must be off the real axis")
    weight = r.map(lambda v: np.log1p(np.abs(v) ** 2))
    edge = weight.values[-1] if side == "right" else weight.values[0]
    if abs(edge) > 1e-16 and not weight.compact:
        # log(1+|r|^2) < 1e-16 is the same statement as |r| < 1e-8
        raise TruncationError("reflection coefficient not decayed at the grid edge")
    return c_j * cmath.exp(1j / math.pi * halfline_cauchy(weight, z0, z_j, side))
