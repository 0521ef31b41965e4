"""Weakly nonlinear amplitude equations for the quadratic-I1 model and their solvers.

Three regimes are covered, all in a frame moving with the linear wave,
``x = eta / alpha - c t``:

* no pre-strain, slow time ``tau = eps^2 t``: the cubic Temple pair
  ``F_tau + beta [(F^2 + G^2) F]_x = 0`` (and the same for ``G``);
* generic propagation direction (``n.B a``, ``n.B b`` of order one), slow time
  ``tau = eps t``: one linearly degenerate mode and one genuinely nonlinear
  mode obeying the inviscid Burgers equation;
* propagation close to a principal axis (``n.B a = eps a``, ``n.B b = eps b``),
  slow time ``tau = eps^2 t``: a coupled 2x2 system with quadratic and cubic
  fluxes and explicit Riemann invariants.

Coefficients are re-derived from the equations of motion.  Two of them carry
factors that differ from the commonly quoted forms; both are exposed
(``burgers_coeff`` vs ``psi_coeff`` and ``flux_coeff``) and validated against
the full solver in :mod:`shearwave.compare`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import warnings

import numpy as np

from .hyperbolic_core import ConservationLaw, Grid1D, integrate
from .kinematics import Prestrain, Triad
from .materials import Material, QuadraticI1, modulus_expansion

__all__ = [
    "RegimeError",
    "ScalarField1D",
    "GenericDirectionExpansion",
    "PrincipalAxisExpansion",
    "generic_expansion",
    "n_matrix",
    "degeneracy_check",
    "burgers_law",
    "burgers_godunov_flux",
    "burgers_run",
    "shock_time",
    "temple_beta",
    "temple_law",
    "temple_run",
    "principal_expansion",
    "coupled_law",
    "coupled_run",
    "riemann_invariants",
    "trace_characteristics",
    "sample",
]


class RegimeError(ValueError):
    """Expansion requested outside the regime it was derived for."""


@dataclass(frozen=True)
class ScalarField1D:
    grid: Grid1D
    values: np.ndarray
    tau: float = 0.0


def _prestrain_for(ps: Prestrain, triad: Triad | None) -> Prestrain:
    if triad is None or triad is ps.triad:
        return ps
    return ps.with_triad(triad)


# ------------------------------------------------------------ generic direction


@dataclass(frozen=True)
class GenericDirectionExpansion:
    w1: float
    w2: float
    nBn: float
    I1bar: float
    kappa: float
    c: float
    M: np.ndarray
    alpha1_sq: float
    alpha2_sq: float
    v1: np.ndarray
    v2: np.ndarray
    burgers_coeff: float

    @property
    def psi_coeff(self) -> float:
        """Coefficient of ``psi psi_x`` for ``(F0, G0) = psi (w1, w2)`` and ``x = eta/alpha2 - c t``.

        Equals ``burgers_coeff / alpha2^2``: projecting the order-eps balance
        onto ``v2`` leaves ``alpha2^2`` multiplying ``psi_tau``.
        """
        return self.burgers_coeff / self.alpha2_sq


def generic_expansion(m: QuadraticI1, ps: Prestrain, triad: Triad | None = None,
                      ) -> GenericDirectionExpansion:
    if not isinstance(m, QuadraticI1):
        raise RegimeError("the generic-direction expansion is derived for the QuadraticI1 model")
    ps = _prestrain_for(ps, triad)
    w1, w2 = ps.nBa, ps.nBb
    if w1 == 0.0 and w2 == 0.0:
        raise RegimeError("n.B a = n.B b = 0: use principal_expansion instead")
    k, p = m.kappa, ps.nBn
    base = (1.0 + k * ps.I1bar) * p
    M = np.array([[base + 2 * k * w1 * w1, 2 * k * w1 * w2],
                  [2 * k * w1 * w2, base + 2 * k * w2 * w2]])
    M.setflags(write=False)
    r = np.hypot(w1, w2)
    v1 = np.array([w2, -w1]) / r
    v2 = np.array([w1, w2]) / r
    c = m.c
    return GenericDirectionExpansion(
        w1=w1, w2=w2, nBn=p, I1bar=ps.I1bar, kappa=k, c=c, M=M,
        alpha1_sq=base,
        alpha2_sq=base + 2 * k * (w1 * w1 + w2 * w2),
        v1=v1, v2=v2,
        burgers_coeff=3 * k * c * p * (w1 * w1 + w2 * w2),
    )


def n_matrix(w1: float, w2: float, F, G) -> np.ndarray:
    """Matrix multiplying ``(F, G)_x`` in the order-eps nonlinear term."""
    return np.array([[3 * w1 * F + w2 * G, w2 * F + w1 * G],
                     [w2 * F + w1 * G, w1 * F + 3 * w2 * G]])


def degeneracy_check(exp: GenericDirectionExpansion, phi, psi):
    """``(v1 . N0 v1, v2 . N0 v2)`` on the modes ``phi v1`` and ``psi v2``.

    Uses the unnormalised eigenvectors ``v1 = (w2, -w1)``, ``v2 = (w1, w2)``,
    for which ``d1 = 0`` and ``d2 = 3 (w1^2 + w2^2)^2 psi``.  Broadcasts.
    """
    w1, w2 = exp.w1, exp.w2
    phi = np.asarray(phi, dtype=float)
    psi = np.asarray(psi, dtype=float)
    u1 = (w2, -w1)
    u2 = (w1, w2)
    N1 = n_matrix(w1, w2, phi * u1[0], phi * u1[1])
    N2 = n_matrix(w1, w2, psi * u2[0], psi * u2[1])
    d1 = (u1[0] * (N1[0, 0] * u1[0] + N1[0, 1] * u1[1])
          + u1[1] * (N1[1, 0] * u1[0] + N1[1, 1] * u1[1]))
    d2 = (u2[0] * (N2[0, 0] * u2[0] + N2[0, 1] * u2[1])
          + u2[1] * (N2[1, 0] * u2[0] + N2[1, 1] * u2[1]))
    if d1.ndim == 0:
        return float(d1), float(d2)
    return d1, d2


# ------------------------------------------------------------ Burgers


def burgers_godunov_flux(uL, uR):
    """Exact Riemann (Godunov) flux for ``u_t + (u^2/2)_x = 0``."""
    fL, fR = 0.5 * uL * uL, 0.5 * uR * uR
    shock = uL > uR
    s = 0.5 * (uL + uR)
    shock_flux = np.where(s > 0.0, fL, fR)
    rare_flux = np.where(uL > 0.0, fL, np.where(uR < 0.0, fR, 0.0))
    return np.where(shock, shock_flux, rare_flux)


def burgers_law() -> ConservationLaw:
    return ConservationLaw(
        flux=lambda u: 0.5 * u * u,
        max_speed=lambda u: np.abs(u[0]),
        interface_flux=burgers_godunov_flux,
        name="burgers",
    )


def _as_values(field, grid):
    vals = field.values if isinstance(field, ScalarField1D) else field
    vals = np.asarray(vals, dtype=float)
    if vals.shape != (grid.n_cells,):
        raise ValueError(f"field must have {grid.n_cells} cells")
    return vals


def burgers_run(coeff: float, psi0, tau_end: float, grid: Grid1D, cfl: float = 0.8,
                scheme: str = "muscl_minmod", stride: int = 1, tvb_m: float = 0.0,
                limiter: str = "minmod") -> list[ScalarField1D]:
    """Solve ``psi_tau + coeff psi psi_x = 0`` through ``psibar = coeff psi``.

    Interfaces use the exact Burgers Riemann solution; ``scheme='rusanov'``
    here means first-order Godunov, ``'muscl_minmod'`` adds limited
    reconstruction and SSPRK2.  Snapshots hold ``psi`` (unscaled).
    """
    psi0 = _as_values(psi0, grid)
    if coeff == 0.0:
        return [ScalarField1D(grid, psi0.copy(), 0.0)] + (
            [ScalarField1D(grid, psi0.copy(), float(tau_end))] if tau_end > 0 else [])
    times, states = integrate(burgers_law(), coeff * psi0, grid, tau_end, cfl=cfl,
                              scheme=scheme, limiter=limiter, stride=stride, tvb_m=tvb_m)
    return [ScalarField1D(grid, u[0] / coeff, t) for t, u in zip(times, states)]


def shock_time(psibar0, grid: Grid1D | None = None) -> float:
    """Breaking time ``1 / max(-d psibar0/dx)``, ``inf`` if the data never steepens.

    The derivative is taken by centred differences (one-sided at the ends of
    a transmissive grid).
    """
    if isinstance(psibar0, ScalarField1D):
        grid = psibar0.grid
        vals = psibar0.values
    else:
        vals = np.asarray(psibar0, dtype=float)
    if grid is None:
        raise ValueError("grid required for raw arrays")
    if grid.boundary == "periodic":
        deriv = (np.roll(vals, -1) - np.roll(vals, 1)) / (2 * grid.dx)
    else:
        deriv = np.gradient(vals, grid.dx)
    steep = float(np.max(-deriv))
    return 1.0 / steep if steep > 0.0 else float("inf")


# ------------------------------------------------------------ Temple system


def temple_beta(m: Material) -> float:
    """``beta = mu1 / (2 rho c)`` with ``c = sqrt(mu0 / rho)`` and ``Q = mu0 + mu1 s``.

    Follows from substituting ``tau = eps^2 t``, ``x = eta - c t`` in
    ``rho F_tt = (Q F)_eta_eta`` and keeping order ``eps^2``.
    """
    mu0, mu1 = modulus_expansion(m)
    c = np.sqrt(mu0 / m.rho)
    return float(mu1 / (2.0 * m.rho * c))


def temple_law(beta: float) -> ConservationLaw:
    def flux(u):
        s = u[0] * u[0] + u[1] * u[1]
        return beta * s * u

    def speed(u):
        return 3.0 * abs(beta) * (u[0] * u[0] + u[1] * u[1])

    return ConservationLaw(flux=flux, max_speed=speed, name="temple")


def temple_run(beta: float, F0, G0, tau_end: float, grid: Grid1D, cfl: float = 0.8,
               scheme: str = "rusanov", stride: int = 1, tvb_m: float = 0.0,
               limiter: str = "minmod"):
    """Solve the Temple pair; returns ``(times, states)`` with states of shape ``(2, n)``."""
    u0 = np.vstack([_as_values(F0, grid), _as_values(G0, grid)])
    return integrate(temple_law(beta), u0, grid, tau_end, cfl=cfl, scheme=scheme,
                     limiter=limiter, stride=stride, tvb_m=tvb_m)


# ------------------------------------------------------------ near principal axis


@dataclass(frozen=True)
class PrincipalAxisExpansion:
    a_s: float
    b_s: float
    nBn: float
    alpha: float
    kappa: float
    c: float
    epsilon: float

    @property
    def flux_coeff(self) -> float:
        """Factor ``kappa c / (2 alpha^2)`` in front of ``[(a + n.Bn F) Lambda]_x``."""
        return self.kappa * self.c / (2.0 * self.alpha ** 2)

    def Lambda(self, F, G):
        return 2 * self.a_s * F + 2 * self.b_s * G + self.nBn * (F * F + G * G)

    def A(self, F, G) -> np.ndarray:
        """Jacobian of ``((a + pF) Lambda, (b + pG) Lambda)`` with respect to ``(F, G)``."""
        p = self.nBn
        lam = self.Lambda(F, G)
        X, Y = self.a_s + p * F, self.b_s + p * G
        return np.array([[p * lam + 2 * X * X, 2 * X * Y],
                         [2 * X * Y, p * lam + 2 * Y * Y]])

    def eigenvalues(self, F, G):
        """``(p Lambda, 2 (a^2 + b^2) + 3 p Lambda)`` -- of ``A``, not yet scaled by ``flux_coeff``."""
        lam = self.Lambda(F, G)
        return self.nBn * lam, 2 * (self.a_s ** 2 + self.b_s ** 2) + 3 * self.nBn * lam

    def eigenvectors(self, F, G):
        X, Y = self.a_s + self.nBn * F, self.b_s + self.nBn * G
        return np.array([Y, -X]), np.array([X, Y])


def principal_expansion(m: QuadraticI1, ps: Prestrain, triad: Triad | None = None,
                        epsilon: float = 0.05) -> PrincipalAxisExpansion:
    if not isinstance(m, QuadraticI1):
        raise RegimeError("the principal-axis expansion is derived for the QuadraticI1 model")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    ps = _prestrain_for(ps, triad)
    if abs(ps.nBa) > 10 * epsilon or abs(ps.nBb) > 10 * epsilon:
        warnings.warn(
            f"n.B a = {ps.nBa:.3g}, n.B b = {ps.nBb:.3g} are not O(epsilon={epsilon:g}); "
            "the near-principal expansion may not apply", RuntimeWarning, stacklevel=2)
    return PrincipalAxisExpansion(
        a_s=ps.nBa / epsilon,
        b_s=ps.nBb / epsilon,
        nBn=ps.nBn,
        alpha=float(np.sqrt((1.0 + m.kappa * ps.I1bar) * ps.nBn)),
        kappa=m.kappa,
        c=m.c,
        epsilon=float(epsilon),
    )


def coupled_law(exp: PrincipalAxisExpansion) -> ConservationLaw:
    k, p, a, b = exp.flux_coeff, exp.nBn, exp.a_s, exp.b_s

    def flux(u):
        lam = exp.Lambda(u[0], u[1])
        return k * np.stack([(a + p * u[0]) * lam, (b + p * u[1]) * lam])

    def speed(u):
        l1, l2 = exp.eigenvalues(u[0], u[1])
        return abs(k) * np.maximum(np.abs(l1), np.abs(l2))

    return ConservationLaw(flux=flux, max_speed=speed, name="coupled")


def coupled_run(exp: PrincipalAxisExpansion, F0, G0, tau_end: float, grid: Grid1D,
                cfl: float = 0.8, scheme: str = "rusanov", stride: int = 1,
                tvb_m: float = 0.0, limiter: str = "minmod"):
    u0 = np.vstack([_as_values(F0, grid), _as_values(G0, grid)])
    return integrate(coupled_law(exp), u0, grid, tau_end, cfl=cfl, scheme=scheme,
                     limiter=limiter, stride=stride, tvb_m=tvb_m)


def riemann_invariants(exp: PrincipalAxisExpansion, F, G):
    """``R = (a + pF)/(b + pG)`` (IEEE signed infinity on a zero denominator) and ``S = Lambda``."""
    F = np.asarray(F, dtype=float)
    G = np.asarray(G, dtype=float)
    num = exp.a_s + exp.nBn * F
    den = exp.b_s + exp.nBn * G
    with np.errstate(divide="ignore", invalid="ignore"):
        R = num / den
    S = exp.Lambda(F, G)
    if R.ndim == 0:
        return float(R), float(S)
    return R, S


# ------------------------------------------------------------ characteristics


def _periodic_interp(grid: Grid1D, values: np.ndarray, x: np.ndarray) -> np.ndarray:
    xc = grid.centers
    xp = np.concatenate([[xc[-1] - grid.length], xc, [xc[0] + grid.length]])
    vp = np.concatenate([[values[-1]], values, [values[0]]])
    xw = grid.origin + np.mod(x - grid.origin, grid.length)
    return np.interp(xw, xp, vp)


def trace_characteristics(times, states, grid: Grid1D,
                          speed: Callable[[np.ndarray], np.ndarray], x0):
    """Follow ``dx/dtau = speed(u(x, tau))`` with explicit Euler between snapshots.

    ``speed`` maps a state array ``(nvar, npoints)`` to point speeds.  Returns
    the positions (unwrapped) at every snapshot, shape ``(len(times), len(x0))``.
    """
    x = np.array(x0, dtype=float)
    path = [x.copy()]
    for k in range(len(times) - 1):
        u = np.vstack([_periodic_interp(grid, comp, x) for comp in states[k]])
        x = x + (times[k + 1] - times[k]) * speed(u)
        path.append(x.copy())
    return np.array(path)


def sample(grid: Grid1D, state: np.ndarray, x) -> np.ndarray:
    """Periodic linear interpolation of each component of ``state`` at ``x``."""
    state = np.atleast_2d(state)
    return np.vstack([_periodic_interp(grid, comp, np.asarray(x, dtype=float)) for comp in state])
