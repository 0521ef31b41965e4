"""Incompressible isotropic strain-energy functions W(I1, I2) and the stresses
they produce along a superposed shear motion.

Three constitutive variants are provided:

* :class:`MooneyRivlin` -- ``W = C (I1 - 3) + E (I2 - 3)``
* :class:`QuadraticI1` -- ``W = mu0/2 [I1 - 3 + kappa/2 (I1^2 - 9)]``
* :class:`Generic` -- user supplied closed forms for ``W1``, ``W2`` (and
  optionally the second derivatives).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .kinematics import Prestrain, motion_invariants

__all__ = [
    "MaterialError",
    "Material",
    "MooneyRivlin",
    "QuadraticI1",
    "Generic",
    "ShearStress",
    "ModulusExpansion",
    "w_derivs",
    "shear_stress",
    "acoustic_stiffness",
    "generalized_shear_modulus",
    "modulus_expansion",
    "pressure_increment",
]

FD_STEP = 1e-5


class MaterialError(ValueError):
    pass


class Material:
    """Common interface; subclasses are frozen dataclasses carrying ``rho``."""

    rho: float

    def derivs(self, I1, I2):
        raise NotImplementedError

    def second_derivs(self, I1, I2):
        """``(W11, W12, W22)`` or ``None`` when no closed form is known."""
        return None


@dataclass(frozen=True)
class MooneyRivlin(Material):
    C: float
    E: float
    rho: float = 1.0

    def __post_init__(self):
        if not self.C > 0:
            raise MaterialError(f"Mooney-Rivlin requires C > 0, got {self.C}")
        if not self.E >= 0:
            raise MaterialError(f"Mooney-Rivlin requires E >= 0, got {self.E}")
        if not self.rho > 0:
            raise MaterialError(f"density must be positive, got {self.rho}")

    def energy(self, I1, I2):
        return self.C * (I1 - 3.0) + self.E * (I2 - 3.0)

    def derivs(self, I1, I2):
        shape = np.shape(np.asarray(I1) + np.asarray(I2))
        return np.full(shape, float(self.C)), np.full(shape, float(self.E))

    def second_derivs(self, I1, I2):
        z = np.zeros(np.shape(np.asarray(I1) + np.asarray(I2)))
        return z, z, z


@dataclass(frozen=True)
class QuadraticI1(Material):
    mu0: float
    kappa: float
    rho: float = 1.0

    def __post_init__(self):
        if not self.mu0 > 0:
            raise MaterialError(f"QuadraticI1 requires mu0 > 0, got {self.mu0}")
        if not self.kappa > 0:
            raise MaterialError(f"QuadraticI1 requires kappa > 0, got {self.kappa}")
        if not self.rho > 0:
            raise MaterialError(f"density must be positive, got {self.rho}")

    @property
    def c(self) -> float:
        """Infinitesimal shear wave speed of the undeformed solid."""
        return float(np.sqrt(self.mu0 / self.rho))

    def energy(self, I1, I2):
        return 0.5 * self.mu0 * (I1 - 3.0 + 0.5 * self.kappa * (I1 * I1 - 9.0))

    def derivs(self, I1, I2):
        I1, I2 = np.broadcast_arrays(np.asarray(I1, dtype=float), np.asarray(I2, dtype=float))
        return 0.5 * self.mu0 * (1.0 + self.kappa * I1), np.zeros(I2.shape)

    def second_derivs(self, I1, I2):
        shape = np.shape(np.asarray(I1) + np.asarray(I2))
        z = np.zeros(shape)
        return np.full(shape, 0.5 * self.mu0 * self.kappa), z, z


@dataclass(frozen=True)
class Generic(Material):
    """Wrap arbitrary closed-form derivatives ``W1(I1, I2)``, ``W2(I1, I2)``."""

    W1: Callable
    W2: Callable
    rho: float = 1.0
    W11: Callable | None = None
    W12: Callable | None = None
    W22: Callable | None = None
    name: str = field(default="generic")

    def __post_init__(self):
        if not self.rho > 0:
            raise MaterialError(f"density must be positive, got {self.rho}")

    def derivs(self, I1, I2):
        I1 = np.asarray(I1, dtype=float)
        I2 = np.asarray(I2, dtype=float)
        shape = np.shape(I1 + I2)
        return (np.broadcast_to(np.asarray(self.W1(I1, I2), dtype=float), shape),
                np.broadcast_to(np.asarray(self.W2(I1, I2), dtype=float), shape))

    def second_derivs(self, I1, I2):
        if self.W11 is None or self.W12 is None or self.W22 is None:
            return None
        shape = np.shape(np.asarray(I1) + np.asarray(I2))
        return tuple(np.broadcast_to(np.asarray(fn(I1, I2), dtype=float), shape)
                     for fn in (self.W11, self.W12, self.W22))

    @classmethod
    def wrap(cls, m: Material, name: str | None = None) -> "Generic":
        """Generic view of a built-in model (first derivatives only)."""
        return cls(
            W1=lambda I1, I2: m.derivs(I1, I2)[0],
            W2=lambda I1, I2: m.derivs(I1, I2)[1],
            rho=m.rho,
            name=name or f"generic({type(m).__name__})",
        )


class ShearStress(NamedTuple):
    t_xi_eta: np.ndarray | float
    t_zeta_eta: np.ndarray | float


class ModulusExpansion(NamedTuple):
    mu0: float
    mu1: float


def _scalar(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def w_derivs(m: Material, I1, I2):
    """``(W1, W2)`` at the given invariants; warns on invariants below 3."""
    if np.any(np.asarray(I1) < 3.0 - 1e-9) or np.any(np.asarray(I2) < 3.0 - 1e-9):
        warnings.warn("invariants below 3 are not attainable by an isochoric deformation",
                      RuntimeWarning, stacklevel=2)
    W1, W2 = m.derivs(I1, I2)
    return _scalar(W1), _scalar(W2)


def _stress_parts(ps: Prestrain, F, G):
    # X = (n.B a + F n.B n, n.B b + G n.B n), Y = n.B^-1 (a, b) - H (F, G)
    X1 = ps.nBa + F * ps.nBn
    X2 = ps.nBb + G * ps.nBn
    Y1 = ps.nBia - F * ps.aBia - G * ps.aBib
    Y2 = ps.nBib - F * ps.aBib - G * ps.bBib
    return X1, X2, Y1, Y2


def shear_stress(m: Material, ps: Prestrain, F, G) -> ShearStress:
    """Shear components ``T_xi_eta``, ``T_zeta_eta`` of the Cauchy stress."""
    F = np.asarray(F, dtype=float)
    G = np.asarray(G, dtype=float)
    I1, I2 = motion_invariants(ps, F, G)
    W1, W2 = m.derivs(I1, I2)
    X1, X2, Y1, Y2 = _stress_parts(ps, F, G)
    return ShearStress(_scalar(2.0 * W1 * X1 - 2.0 * W2 * Y1),
                       _scalar(2.0 * W1 * X2 - 2.0 * W2 * Y2))


def acoustic_stiffness(m: Material, ps: Prestrain, F, G):
    """Jacobian ``K = d(T_xi_eta, T_zeta_eta)/d(F, G)`` as ``(K11, K12, K22)``.

    The shear stresses are the gradient of ``W(I1(F, G), I2(F, G))`` so ``K``
    is symmetric.  Without closed-form second derivatives of ``W`` the
    Jacobian falls back to central differences of :func:`shear_stress`.
    """
    F = np.asarray(F, dtype=float)
    G = np.asarray(G, dtype=float)
    I1, I2 = motion_invariants(ps, F, G)
    second = m.second_derivs(I1, I2)
    if second is None:
        return _stiffness_fd(m, ps, F, G)
    W1, W2 = m.derivs(I1, I2)
    W11, W12, W22 = second
    X1, X2, Y1, Y2 = _stress_parts(ps, F, G)

    def hess(Xi, Yi, Xj, Yj):
        return W11 * Xi * Xj - W12 * (Xi * Yj + Yi * Xj) + W22 * Yi * Yj

    K11 = 2.0 * W1 * ps.nBn + 2.0 * W2 * ps.aBia + 4.0 * hess(X1, Y1, X1, Y1)
    K12 = 2.0 * W2 * ps.aBib + 4.0 * hess(X1, Y1, X2, Y2)
    K22 = 2.0 * W1 * ps.nBn + 2.0 * W2 * ps.bBib + 4.0 * hess(X2, Y2, X2, Y2)
    return K11, K12, K22


def _stiffness_fd(m, ps, F, G):
    hF = 1e-6 * (1.0 + np.abs(F))
    hG = 1e-6 * (1.0 + np.abs(G))
    Tp = shear_stress(m, ps, F + hF, G)
    Tm = shear_stress(m, ps, F - hF, G)
    K11 = (np.asarray(Tp[0]) - Tm[0]) / (2 * hF)
    K21 = (np.asarray(Tp[1]) - Tm[1]) / (2 * hF)
    Tp = shear_stress(m, ps, F, G + hG)
    Tm = shear_stress(m, ps, F, G - hG)
    K12 = (np.asarray(Tp[0]) - Tm[0]) / (2 * hG)
    K22 = (np.asarray(Tp[1]) - Tm[1]) / (2 * hG)
    return K11, 0.5 * (K12 + K21), K22


def _modulus(m: Material, s):
    inv = 3.0 + np.asarray(s, dtype=float)
    W1, W2 = m.derivs(inv, inv)
    return 2.0 * (W1 + W2)


def generalized_shear_modulus(m: Material, F, G):
    """``Q = 2 (W1 + W2)`` at ``I1 = I2 = 3 + F^2 + G^2`` (no pre-strain)."""
    s = np.asarray(F, dtype=float) ** 2 + np.asarray(G, dtype=float) ** 2
    return _scalar(_modulus(m, s))


def modulus_expansion(m: Material) -> ModulusExpansion:
    """Leading coefficients of ``Q(s) = mu0 + mu1 s + ...`` with ``s = F^2 + G^2``."""
    if isinstance(m, MooneyRivlin):
        return ModulusExpansion(2.0 * (m.C + m.E), 0.0)
    if isinstance(m, QuadraticI1):
        return ModulusExpansion(m.mu0 * (1.0 + 3.0 * m.kappa), m.mu0 * m.kappa)
    return modulus_expansion_fd(m)


def modulus_expansion_fd(m: Material, h: float = FD_STEP) -> ModulusExpansion:
    """Central differences at ``s = 0`` with one Richardson extrapolation."""
    def d(step):
        return (float(_modulus(m, step)) - float(_modulus(m, -step))) / (2.0 * step)

    mu1 = (4.0 * d(0.5 * h) - d(h)) / 3.0
    return ModulusExpansion(float(_modulus(m, 0.0)), mu1)


def pressure_increment(m: Material, ps: Prestrain, F, G):
    """Pressure change ``q`` keeping ``T_eta_eta`` at its static value."""
    F = np.asarray(F, dtype=float)
    G = np.asarray(G, dtype=float)
    I1, I2 = motion_invariants(ps, F, G)
    W1, W2 = m.derivs(I1, I2)
    W1s, W2s = m.derivs(ps.I1bar, ps.I2bar)
    # n.B n is unchanged by the shear; n.B^-1 n = (n - F a - G b).B^-1 (n - F a - G b)
    nBin = (ps.nBin - 2.0 * (F * ps.nBia + G * ps.nBib)
            + F * F * ps.aBia + 2.0 * F * G * ps.aBib + G * G * ps.bBib)
    q = (2.0 * W1 * ps.nBn - 2.0 * W2 * nBin) - (2.0 * W1s * ps.nBn - 2.0 * W2s * ps.nBin)
    return _scalar(q)


def normal_stress(m: Material, ps: Prestrain, F, G, pbar: float = 0.0):
    """``T_eta_eta`` with the pressure ``pbar + q`` from :func:`pressure_increment`."""
    F = np.asarray(F, dtype=float)
    G = np.asarray(G, dtype=float)
    I1, I2 = motion_invariants(ps, F, G)
    W1, W2 = m.derivs(I1, I2)
    nBin = (ps.nBin - 2.0 * (F * ps.nBia + G * ps.nBib)
            + F * F * ps.aBia + 2.0 * F * G * ps.aBib + G * G * ps.bBib)
    q = pressure_increment(m, ps, F, G)
    return _scalar(-(pbar + q) + 2.0 * W1 * ps.nBn - 2.0 * W2 * nBin)
