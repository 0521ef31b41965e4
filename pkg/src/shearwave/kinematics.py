"""Frames, pre-deformation and the kinematics of two superposed shear waves.

The motion is ``x = F0 X + f(eta, t) a + g(eta, t) b`` where ``(n, a, b)`` is
an orthonormal triad and ``eta = n . x``.  Everything downstream only needs
the wave gradients ``F = f_eta`` and ``G = g_eta`` together with a handful of
quadratic forms of the static left Cauchy-Green tensor and its inverse, which
are cached on :class:`Prestrain`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "KinematicsError",
    "Triad",
    "Prestrain",
    "make_triad",
    "prestrain_from_F",
    "motion_invariants",
    "full_cauchy_green",
    "random_unimodular",
]

DET_TOL = 1e-10
ORTHO_TOL = 1e-12
PARALLEL_ANGLE = 1e-8


class KinematicsError(ValueError):
    """Raised for inadmissible frames or pre-deformations."""


def _frozen(x) -> np.ndarray:
    arr = np.array(x, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Triad:
    """Orthonormal frame: propagation direction ``n``, polarisations ``a``, ``b = n x a``."""

    n: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        for name in ("n", "a", "b"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    def matrix(self) -> np.ndarray:
        """Rows are ``n``, ``a``, ``b``; maps lab components to triad components."""
        return np.vstack([self.n, self.a, self.b])

    def residual(self) -> float:
        q = self.matrix()
        return float(np.max(np.abs(q @ q.T - np.eye(3))))


def make_triad(n, a_hint=None) -> Triad:
    """Build an orthonormal triad around the propagation direction ``n``.

    Without ``a_hint`` the polarisation ``a`` is obtained by projecting the
    standard basis vector least aligned with ``n`` (lowest index on ties)
    onto the plane normal to ``n``.
    """
    n = np.asarray(n, dtype=float)
    norm = np.linalg.norm(n)
    if not np.isfinite(norm) or norm == 0.0:
        raise KinematicsError("propagation direction n has zero length")
    n = n / norm

    if a_hint is None:
        k = int(np.argmin(np.abs(n)))
        e = np.zeros(3)
        e[k] = 1.0
        a = e - n[k] * n
    else:
        a_hint = np.asarray(a_hint, dtype=float)
        hn = np.linalg.norm(a_hint)
        if hn == 0.0:
            raise KinematicsError("a_hint has zero length")
        a_hint = a_hint / hn
        sin_angle = np.linalg.norm(np.cross(n, a_hint))
        if sin_angle < np.sin(PARALLEL_ANGLE):
            raise KinematicsError("a_hint is parallel to n")
        a = a_hint - np.dot(a_hint, n) * n
    a = a / np.linalg.norm(a)
    b = np.cross(n, a)
    return Triad(n, a, b)


@dataclass(frozen=True)
class Prestrain:
    """Static homogeneous pre-deformation seen from a given triad.

    Besides the six projections listed by the theory, ``nBia = n.B^-1 a`` and
    ``nBib = n.B^-1 b`` are stored since ``I2`` of the superposed motion and
    the shear stresses depend on them.
    """

    Fbar: np.ndarray
    Bbar: np.ndarray
    BbarInv: np.ndarray
    triad: Triad
    I1bar: float
    I2bar: float
    nBn: float
    nBa: float
    nBb: float
    aBia: float
    bBib: float
    aBib: float
    nBia: float
    nBib: float
    nBin: float

    @property
    def projected_inverse(self) -> np.ndarray:
        """2x2 restriction of ``B^-1`` to span{a, b}."""
        return np.array([[self.aBia, self.aBib], [self.aBib, self.bBib]])

    def with_triad(self, triad: Triad) -> "Prestrain":
        return prestrain_from_F(self.Fbar, triad)


def prestrain_from_F(Fbar, triad: Triad) -> Prestrain:
    Fbar = np.asarray(Fbar, dtype=float)
    if Fbar.shape != (3, 3) or not np.all(np.isfinite(Fbar)):
        raise KinematicsError("Fbar must be a finite 3x3 matrix")
    det = np.linalg.det(Fbar)
    if abs(det - 1.0) > DET_TOL:
        raise KinematicsError(
            f"incompressibility violated: det(Fbar) = {det!r} (must be 1 within {DET_TOL})"
        )
    B = Fbar @ Fbar.T
    B = 0.5 * (B + B.T)
    try:
        Binv = np.linalg.inv(B)
    except np.linalg.LinAlgError as exc:
        raise KinematicsError("Bbar is singular") from exc
    Binv = 0.5 * (Binv + Binv.T)

    n, a, b = triad.n, triad.a, triad.b
    return Prestrain(
        Fbar=_frozen(Fbar),
        Bbar=_frozen(B),
        BbarInv=_frozen(Binv),
        triad=triad,
        I1bar=float(np.trace(B)),
        I2bar=float(np.trace(Binv)),
        nBn=float(n @ B @ n),
        nBa=float(n @ B @ a),
        nBb=float(n @ B @ b),
        aBia=float(a @ Binv @ a),
        bBib=float(b @ Binv @ b),
        aBib=float(a @ Binv @ b),
        nBia=float(n @ Binv @ a),
        nBib=float(n @ Binv @ b),
        nBin=float(n @ Binv @ n),
    )


def motion_invariants(ps: Prestrain, F, G):
    """``(I1, I2)`` of the superposed motion for wave gradients ``F``, ``G``.

    Broadcasts over array arguments.  ``I2`` carries the ``2 F G a.B^-1 b``
    cross term, which vanishes only for polarisations satisfying
    ``a.B^-1 b = 0``.
    """
    F = np.asarray(F, dtype=float)
    G = np.asarray(G, dtype=float)
    I1 = ps.I1bar + 2.0 * (F * ps.nBa + G * ps.nBb) + (F * F + G * G) * ps.nBn
    I2 = (
        ps.I2bar
        - 2.0 * (F * ps.nBia + G * ps.nBib)
        + F * F * ps.aBia
        + 2.0 * F * G * ps.aBib
        + G * G * ps.bBib
    )
    if I1.ndim == 0:
        return float(I1), float(I2)
    return I1, I2


def full_cauchy_green(ps: Prestrain, F: float, G: float):
    """Exact ``B`` and ``B^-1`` (lab components) of the superposed motion."""
    n, a, b = ps.triad.n, ps.triad.a, ps.triad.b
    d = F * a + G * b
    L = np.eye(3) + np.outer(d, n)
    Linv = np.eye(3) - np.outer(d, n)
    B = L @ ps.Bbar @ L.T
    Binv = Linv.T @ ps.BbarInv @ Linv
    return B, Binv


def random_unimodular(rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Random matrices with entries in [-1, 1], rescaled to unit determinant.

    Draws with ``|det| < 0.1`` are rejected before rescaling.
    """
    count = 1 if size is None else size
    out = np.empty((count, 3, 3))
    filled = 0
    while filled < count:
        m = rng.uniform(-1.0, 1.0, size=(max(count - filled, 8), 3, 3))
        det = np.linalg.det(m)
        keep = np.abs(det) >= 0.1
        m, det = m[keep], det[keep]
        m = m * (np.sign(det) * np.abs(det) ** (-1.0 / 3.0))[:, None, None]
        take = min(len(m), count - filled)
        out[filled:filled + take] = m[:take]
        filled += take
    return out[0] if size is None else out
