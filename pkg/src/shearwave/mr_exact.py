"""Exact theory for Mooney-Rivlin solids.

For ``W = C (I1 - 3) + E (I2 - 3)`` the shear stresses are affine in the wave
gradients, so the two transverse displacements obey the linear system

    rho [f, g]_tt = K [f, g]_eta_eta,
    K = 2 [[C n.Bn + E a.B^-1 a, E a.B^-1 b], [E a.B^-1 b, C n.Bn + E b.B^-1 b]]

whatever the (orthogonal) polarisations.  Rotating by ``theta`` decouples it
into two d'Alembert problems with speeds ``c1 >= c2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicSpline

from .kinematics import Prestrain, Triad, make_triad, prestrain_from_F

__all__ = [
    "MRSystem",
    "assemble_mr_system",
    "decoupling_angle",
    "rotation",
    "decouple",
    "recouple",
    "Profile",
    "Gaussian",
    "Sine",
    "Sampled",
    "Zero",
    "DalembertProfile",
    "dalembert_evaluate",
    "dalembert_fields",
    "BHResult",
    "bh_polarization",
    "positivity_certificate",
]

ANGLE_EPS = 1e-14


@dataclass(frozen=True)
class MRSystem:
    matrix: np.ndarray
    lambda1: float
    lambda2: float
    theta: float
    c1: float
    c2: float
    rho: float


def decoupling_angle(aBia: float, bBib: float, aBib: float) -> float:
    """``theta`` in (-pi/2, pi/2] with ``tan 2 theta = 2 a.B^-1 b / (a.B^-1 a - b.B^-1 b)``."""
    y = 2.0 * aBib
    x = aBia - bBib
    scale = max(1.0, abs(aBia) + abs(bBib))
    if abs(y) < ANGLE_EPS * scale and abs(x) < ANGLE_EPS * scale:
        return 0.0
    theta = 0.5 * np.arctan2(y, x)
    if theta <= -0.5 * np.pi:
        theta += np.pi
    return float(theta)


def assemble_mr_system(C: float, E: float, rho: float, ps: Prestrain) -> MRSystem:
    if not (C > 0 and E >= 0 and rho > 0):
        raise ValueError("need C > 0, E >= 0, rho > 0")
    p = ps.nBn
    h11, h22, h12 = ps.aBia, ps.bBib, ps.aBib
    K = 2.0 * np.array([[C * p + E * h11, E * h12], [E * h12, C * p + E * h22]])

    mean = 2.0 * C * p + E * (h11 + h22)
    radius = E * np.hypot(h11 - h22, 2.0 * h12)
    lam1 = mean + radius
    # product form avoids cancellation in mean - radius
    det = 4.0 * ((C * p + E * h11) * (C * p + E * h22) - (E * h12) ** 2)
    lam2 = det / lam1
    assert lam1 >= lam2 > 0, "Mooney-Rivlin eigenvalues must be positive"
    K.setflags(write=False)
    return MRSystem(
        matrix=K,
        lambda1=float(lam1),
        lambda2=float(lam2),
        theta=decoupling_angle(h11, h22, h12),
        c1=float(np.sqrt(lam1 / rho)),
        c2=float(np.sqrt(lam2 / rho)),
        rho=float(rho),
    )


def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def decouple(ms: MRSystem, f, g):
    """Normal coordinates ``(u, v) = R(theta) (f, g)``."""
    R = rotation(ms.theta)
    return R[0, 0] * f + R[0, 1] * g, R[1, 0] * f + R[1, 1] * g


def recouple(ms: MRSystem, u, v):
    R = rotation(ms.theta)
    return R[0, 0] * u + R[1, 0] * v, R[0, 1] * u + R[1, 1] * v


class Profile:
    """A scalar function of one variable together with its derivative."""

    def __call__(self, s):
        raise NotImplementedError

    def derivative(self, s):
        raise NotImplementedError


@dataclass(frozen=True)
class Zero(Profile):
    def __call__(self, s):
        return np.zeros_like(np.asarray(s, dtype=float))

    def derivative(self, s):
        return np.zeros_like(np.asarray(s, dtype=float))


@dataclass(frozen=True)
class Gaussian(Profile):
    """``amplitude * exp(-((s - center)/width)^2)``, optionally summed over periodic images."""

    amplitude: float = 1.0
    center: float = 0.0
    width: float = 1.0
    period: float | None = None
    images: int = 3

    def _shifts(self):
        if self.period is None:
            return (0.0,)
        return tuple(k * self.period for k in range(-self.images, self.images + 1))

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        if self.period is not None:
            s = np.mod(s - self.center + 0.5 * self.period, self.period) + self.center - 0.5 * self.period
        out = np.zeros_like(s)
        for shift in self._shifts():
            z = (s - self.center - shift) / self.width
            out += np.exp(-z * z)
        return self.amplitude * out

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        if self.period is not None:
            s = np.mod(s - self.center + 0.5 * self.period, self.period) + self.center - 0.5 * self.period
        out = np.zeros_like(s)
        for shift in self._shifts():
            z = (s - self.center - shift) / self.width
            out += -2.0 * z / self.width * np.exp(-z * z)
        return self.amplitude * out


@dataclass(frozen=True)
class Sine(Profile):
    amplitude: float = 1.0
    wavenumber: float = 1.0
    phase: float = 0.0

    def __call__(self, s):
        return self.amplitude * np.sin(self.wavenumber * np.asarray(s, dtype=float) + self.phase)

    def derivative(self, s):
        k = self.wavenumber
        return self.amplitude * k * np.cos(k * np.asarray(s, dtype=float) + self.phase)


class Sampled(Profile):
    """Cubic interpolant of sampled values; periodic when ``period`` is given."""

    def __init__(self, x, values, period: float | None = None):
        x = np.asarray(x, dtype=float)
        values = np.asarray(values, dtype=float)
        self.period = period
        if period is not None:
            x = np.append(x, x[0] + period)
            values = np.append(values, values[0])
            self._spline = CubicSpline(x, values, bc_type="periodic")
            self._x0 = x[0]
        else:
            self._spline = CubicSpline(x, values, bc_type="not-a-knot", extrapolate=False)
        self._dspline = self._spline.derivative()

    def _wrap(self, s):
        s = np.asarray(s, dtype=float)
        if self.period is None:
            return s
        return np.mod(s - self._x0, self.period) + self._x0

    def __call__(self, s):
        return np.nan_to_num(self._spline(self._wrap(s)))

    def derivative(self, s):
        return np.nan_to_num(self._dspline(self._wrap(s)))


@dataclass(frozen=True)
class DalembertProfile:
    """Right (``minus``) and left (``plus``) moving parts of ``u`` and ``v``."""

    u_minus: Profile = Zero()
    u_plus: Profile = Zero()
    v_minus: Profile = Zero()
    v_plus: Profile = Zero()


def dalembert_evaluate(ms: MRSystem, profile: DalembertProfile, eta, t: float):
    """Exact displacements ``(f, g)`` at ``(eta, t)``."""
    eta = np.asarray(eta, dtype=float)
    u = profile.u_minus(eta - ms.c1 * t) + profile.u_plus(eta + ms.c1 * t)
    v = profile.v_minus(eta - ms.c2 * t) + profile.v_plus(eta + ms.c2 * t)
    return recouple(ms, u, v)


def dalembert_fields(ms: MRSystem, profile: DalembertProfile, eta, t: float):
    """Exact first-order fields ``(F, G, V, W) = (f_eta, g_eta, f_t, g_t)``."""
    eta = np.asarray(eta, dtype=float)
    xm1, xp1 = eta - ms.c1 * t, eta + ms.c1 * t
    xm2, xp2 = eta - ms.c2 * t, eta + ms.c2 * t
    du_m, du_p = profile.u_minus.derivative(xm1), profile.u_plus.derivative(xp1)
    dv_m, dv_p = profile.v_minus.derivative(xm2), profile.v_plus.derivative(xp2)
    F, G = recouple(ms, du_m + du_p, dv_m + dv_p)
    V, W = recouple(ms, ms.c1 * (du_p - du_m), ms.c2 * (dv_p - dv_m))
    return F, G, V, W


class BHResult(NamedTuple):
    triad: Triad
    residual: float
    isotropic: bool


def bh_polarization(Bbar, n, BbarInv=None) -> BHResult:
    """Polarisations along the axes of the elliptic section of ``x.B^-1 x = 1`` by ``n.x = 0``.

    The returned triad satisfies ``a.B^-1 b = 0``.  When that section is a
    circle every in-plane pair qualifies; the initial triad is returned with
    ``isotropic=True``.
    """
    Bbar = np.asarray(Bbar, dtype=float)
    Binv = np.linalg.inv(Bbar) if BbarInv is None else np.asarray(BbarInv, dtype=float)
    start = make_triad(n)
    a, b = start.a, start.b
    h11, h22, h12 = a @ Binv @ a, b @ Binv @ b, a @ Binv @ b
    scale = max(1.0, abs(h11) + abs(h22))
    if abs(h11 - h22) < ANGLE_EPS * scale and abs(h12) < ANGLE_EPS * scale:
        return BHResult(start, float(abs(h12)), True)
    theta = 0.5 * np.arctan2(2.0 * h12, h11 - h22)
    c, s = np.cos(theta), np.sin(theta)
    a_new = c * a + s * b
    a_new /= np.linalg.norm(a_new)
    triad = Triad(start.n, a_new, np.cross(start.n, a_new))
    residual = abs(triad.a @ Binv @ triad.b)
    return BHResult(triad, float(residual), False)


def positivity_certificate(ps: Prestrain, C: float, E: float):
    """Left side of the ``lambda2 > 0`` inequality and ``|V^-1 a x V^-1 b|^2``.

    ``V`` is the symmetric square root of ``B`` (eigenvalues clamped at 1e-14).
    The cross term must equal the Gram determinant of the projected inverse.
    """
    p, h11, h22, h12 = ps.nBn, ps.aBia, ps.bBib, ps.aBib
    gram = h11 * h22 - h12 * h12
    lhs = C * C * p * p + C * E * p * (h11 + h22) + E * E * gram

    w, Q = np.linalg.eigh(ps.Bbar)
    w = np.maximum(w, 1e-14)
    Vinv = (Q / np.sqrt(w)) @ Q.T
    cross = np.cross(Vinv @ ps.triad.a, Vinv @ ps.triad.b)
    cross_term = float(cross @ cross)
    assert abs(cross_term - gram) <= 1e-10 * max(abs(gram), abs(h11 * h22)), \
        "cross term disagrees with the Gram identity"
    assert lhs > 0
    return float(lhs), cross_term


def prestrain_with_bh_triad(Fbar, n) -> tuple[Prestrain, BHResult]:
    Fbar = np.asarray(Fbar, dtype=float)
    res = bh_polarization(Fbar @ Fbar.T, n)
    return prestrain_from_F(Fbar, res.triad), res
