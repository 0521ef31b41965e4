"""Finite-volume solver for the full nonlinear shear-wave equations.

With ``F = f_eta``, ``G = g_eta``, ``V = f_t``, ``W = g_t`` the equations of
motion become the conservation law

    F_t - V_eta = 0,   G_t - W_eta = 0,
    V_t - T_xi_eta(F, G)_eta / rho = 0,   W_t - T_zeta_eta(F, G)_eta / rho = 0,

which is discretised with a Rusanov (local Lax-Friedrichs) flux, either first
order in space and time or with minmod-limited MUSCL reconstruction and the
two-stage SSP Runge-Kutta method.  The kernel (:func:`integrate`) works for any
:class:`ConservationLaw` and is reused by the amplitude equations.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .kinematics import Prestrain
from .materials import Material, acoustic_stiffness, shear_stress

__all__ = [
    "SolverError",
    "HyperbolicityError",
    "Grid1D",
    "WaveState",
    "SolverConfig",
    "ConservationLaw",
    "integrate",
    "elastic_law",
    "flux",
    "max_wavespeed",
    "step",
    "run",
    "cell_average",
    "initial_state",
    "displacements",
    "l2_norm",
]

log = logging.getLogger(__name__)

SCHEMES = ("rusanov", "muscl_minmod")
LIMITERS = ("minmod", "none")
BOUNDARIES = ("periodic", "transmissive")


class SolverError(RuntimeError):
    pass


class HyperbolicityError(SolverError):
    pass


@dataclass(frozen=True)
class Grid1D:
    n_cells: int
    length: float
    boundary: str = "periodic"
    origin: float = 0.0

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 16:
            raise ValueError(f"n_cells must be an integer >= 16, got {self.n_cells}")
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")

    @property
    def dx(self) -> float:
        return self.length / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return self.origin + (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def edges(self) -> np.ndarray:
        return self.origin + np.arange(self.n_cells + 1) * self.dx


@dataclass(frozen=True)
class SolverConfig:
    cfl: float = 0.8
    scheme: str = "muscl_minmod"
    t_end: float = 1.0
    snapshot_stride: int = 1
    limiter: str = "minmod"
    tvb_m: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.cfl < 1.0:
            raise ValueError(f"cfl must lie in (0, 1), got {self.cfl}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.limiter not in LIMITERS:
            raise ValueError(f"limiter must be one of {LIMITERS}, got {self.limiter!r}")
        if not self.tvb_m >= 0:
            raise ValueError("tvb_m must be non-negative")
        if not self.t_end >= 0:
            raise ValueError("t_end must be non-negative")
        if int(self.snapshot_stride) != self.snapshot_stride or self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be a positive integer")


@dataclass(frozen=True)
class WaveState:
    grid: Grid1D
    F: np.ndarray
    G: np.ndarray
    V: np.ndarray
    W: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        for name in ("F", "G", "V", "W"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (self.grid.n_cells,):
                raise ValueError(f"{name} must have length {self.grid.n_cells}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def as_array(self) -> np.ndarray:
        return np.vstack([self.F, self.G, self.V, self.W])

    @classmethod
    def from_array(cls, grid: Grid1D, u: np.ndarray, t: float) -> "WaveState":
        return cls(grid, u[0], u[1], u[2], u[3], t)


@dataclass(frozen=True)
class ConservationLaw:
    """``u_t + flux(u)_x = 0`` for state arrays of shape ``(nvar, ncells)``.

    ``max_speed`` returns the per-cell spectral radius of the flux Jacobian.
    ``interface_flux(uL, uR)`` overrides the Rusanov flux when given.
    """

    flux: Callable[[np.ndarray], np.ndarray]
    max_speed: Callable[[np.ndarray], np.ndarray]
    interface_flux: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    name: str = field(default="law")


# ---------------------------------------------------------------- kernel


def _pad(u: np.ndarray, ng: int, boundary: str) -> np.ndarray:
    if boundary == "periodic":
        return np.concatenate([u[:, -ng:], u, u[:, :ng]], axis=1)
    return np.concatenate([np.repeat(u[:, :1], ng, axis=1), u,
                           np.repeat(u[:, -1:], ng, axis=1)], axis=1)


def _minmod(a, b):
    return np.where(a * b > 0.0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def _interface_states(u, boundary, order, limiter, tvb_m=0.0, dx=1.0):
    """Left/right states at the ``n + 1`` interfaces of the ``n`` cells.

    With ``tvb_m > 0`` the minmod limiter is switched off wherever both one-sided
    differences are below ``tvb_m dx^2`` (TVB correction), which keeps smooth
    extrema from being clipped.
    """
    if order == 1:
        ue = _pad(u, 1, boundary)
        return ue[:, :-1], ue[:, 1:]
    ue = _pad(u, 2, boundary)
    back = ue[:, 1:-1] - ue[:, :-2]
    fwd = ue[:, 2:] - ue[:, 1:-1]
    if limiter == "minmod":
        slope = _minmod(back, fwd)
        if tvb_m > 0.0:
            smooth = np.maximum(np.abs(back), np.abs(fwd)) <= tvb_m * dx * dx
            slope = np.where(smooth, 0.5 * (back + fwd), slope)
    else:
        slope = 0.5 * (back + fwd)
    # slope lives on cells -1 .. n
    centre = ue[:, 1:-1]
    uL = centre[:, :-1] + 0.5 * slope[:, :-1]
    uR = centre[:, 1:] - 0.5 * slope[:, 1:]
    return uL, uR


def _numerical_flux(law: ConservationLaw, uL, uR):
    if law.interface_flux is not None:
        return law.interface_flux(uL, uR)
    s = np.maximum(law.max_speed(uL), law.max_speed(uR))
    return 0.5 * (law.flux(uL) + law.flux(uR)) - 0.5 * s * (uR - uL)


def _residual(law, u, dx, boundary, order, limiter, tvb_m=0.0):
    uL, uR = _interface_states(u, boundary, order, limiter, tvb_m, dx)
    phi = _numerical_flux(law, uL, uR)
    return -(phi[:, 1:] - phi[:, :-1]) / dx


def _check_finite(u, t, name):
    if not np.all(np.isfinite(u)):
        bad = np.argwhere(~np.isfinite(u))[0]
        raise SolverError(
            f"{name}: non-finite value at t={t!r} in variable {bad[0]}, cell {bad[1]}")


def integrate(law: ConservationLaw, u0, grid: Grid1D, t_end: float, cfl: float = 0.8,
              scheme: str = "rusanov", limiter: str = "minmod", stride: int = 1,
              t0: float = 0.0, dt_max: float | None = None, tvb_m: float = 0.0):
    """March ``u0`` to ``t_end``; return ``(times, states)`` every ``stride`` steps plus the last.

    ``scheme='rusanov'`` is first order with forward Euler, ``'muscl_minmod'``
    reconstructs linearly (limited unless ``limiter='none'``) and uses SSPRK2.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    u = np.array(u0, dtype=float)
    if u.ndim == 1:
        u = u[None, :]
    order = 1 if scheme == "rusanov" else 2
    dx = grid.dx
    t = float(t0)
    times, states = [t], [u.copy()]
    nstep = 0
    _check_finite(u, t, law.name)
    while t < t_end:
        smax = float(np.max(law.max_speed(u)))
        dt = t_end - t if smax <= 0.0 else cfl * dx / smax
        if dt_max is not None:
            dt = min(dt, dt_max)
        last = t + dt >= t_end * (1.0 - 1e-14)
        if last:
            dt = t_end - t
        if order == 1:
            u = u + dt * _residual(law, u, dx, grid.boundary, 1, limiter)
        else:
            u1 = u + dt * _residual(law, u, dx, grid.boundary, 2, limiter, tvb_m)
            u = 0.5 * (u + u1 + dt * _residual(law, u1, dx, grid.boundary, 2, limiter, tvb_m))
        t = t_end if last else t + dt
        nstep += 1
        _check_finite(u, t, law.name)
        if nstep % stride == 0 or last:
            times.append(t)
            states.append(u.copy())
    log.debug("%s: %d steps to t=%g on %d cells", law.name, nstep, t, grid.n_cells)
    return times, states


# ---------------------------------------------------------------- elastic law


def _sym2_eigs(k11, k12, k22):
    mean = 0.5 * (k11 + k22)
    rad = np.hypot(0.5 * (k11 - k22), k12)
    return mean + rad, mean - rad


def _speeds(m: Material, ps: Prestrain, u: np.ndarray) -> np.ndarray:
    K11, K12, K22 = acoustic_stiffness(m, ps, u[0], u[1])
    hi, lo = _sym2_eigs(np.asarray(K11), np.asarray(K12), np.asarray(K22))
    if np.any(lo < 0.0):
        i = int(np.argmin(lo))
        raise HyperbolicityError(
            f"loss of hyperbolicity: complex characteristic speeds at cell {i} "
            f"(F={u[0][i]!r}, G={u[1][i]!r}, V={u[2][i]!r}, W={u[3][i]!r}); "
            f"smallest stiffness eigenvalue {lo[i]!r}")
    return np.sqrt(hi / m.rho)


def flux(m: Material, ps: Prestrain, state_cell) -> np.ndarray:
    """Flux ``(-V, -W, -T_xi_eta/rho, -T_zeta_eta/rho)``; broadcasts over cells."""
    F, G, V, W = (np.asarray(x, dtype=float) for x in state_cell)
    T1, T2 = shear_stress(m, ps, F, G)
    return np.stack(np.broadcast_arrays(-V, -W, -np.asarray(T1) / m.rho,
                                        -np.asarray(T2) / m.rho))


def elastic_law(m: Material, ps: Prestrain) -> ConservationLaw:
    return ConservationLaw(
        flux=lambda u: flux(m, ps, u),
        max_speed=lambda u: _speeds(m, ps, u),
        name="shear-wave",
    )


def max_wavespeed(m: Material, ps: Prestrain, state: WaveState) -> float:
    return float(np.max(_speeds(m, ps, state.as_array())))


def step(m: Material, ps: Prestrain, state: WaveState, cfg: SolverConfig,
         dt: float | None = None) -> WaveState:
    """One time step of size ``cfl dx / max_wavespeed`` (or ``dt`` when given)."""
    grid = state.grid
    law = elastic_law(m, ps)
    if dt is None:
        dt = cfg.cfl * grid.dx / max_wavespeed(m, ps, state)
    times, states = integrate(law, state.as_array(), grid, state.t + dt, cfl=cfg.cfl,
                              scheme=cfg.scheme, limiter=cfg.limiter, t0=state.t,
                              dt_max=dt, tvb_m=cfg.tvb_m)
    return WaveState.from_array(grid, states[-1], times[-1])


def run(m: Material, ps: Prestrain, initial: WaveState, cfg: SolverConfig) -> list[WaveState]:
    """Advance to ``cfg.t_end``; snapshots every ``snapshot_stride`` steps plus the final state."""
    if cfg.t_end <= initial.t:
        return [initial]
    times, states = integrate(elastic_law(m, ps), initial.as_array(), initial.grid,
                              cfg.t_end, cfl=cfg.cfl, scheme=cfg.scheme,
                              limiter=cfg.limiter, stride=cfg.snapshot_stride, t0=initial.t,
                              tvb_m=cfg.tvb_m)
    return [WaveState.from_array(initial.grid, u, t) for t, u in zip(times, states)]


# ---------------------------------------------------------------- data helpers

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(4)


def cell_average(fn: Callable[[np.ndarray], np.ndarray], grid: Grid1D) -> np.ndarray:
    """Cell averages of ``fn`` by 4-point Gauss-Legendre quadrature."""
    xc = grid.centers
    acc = np.zeros_like(xc)
    for node, weight in zip(_GL_NODES, _GL_WEIGHTS):
        acc = acc + 0.5 * weight * np.asarray(fn(xc + 0.5 * grid.dx * node))
    return acc


def initial_state(m: Material, ps: Prestrain, grid: Grid1D, profile: Callable,
                  epsilon: float, polarization=(1.0, 0.0), motion: str = "right") -> WaveState:
    """Wave gradients ``epsilon * profile(eta) * polarization`` with linearised velocities.

    ``motion='right'`` (``'left'``) sets ``(V, W) = -(+) S (F, G)`` where ``S`` is
    the square root of the acoustic stiffness over density at the unstrained
    wave state, i.e. an exact simple wave of the linearised system.
    ``'rest'`` starts from zero velocity.
    """
    pol = np.asarray(polarization, dtype=float)
    base = cell_average(profile, grid)
    F, G = epsilon * pol[0] * base, epsilon * pol[1] * base
    if motion == "rest":
        V = W = np.zeros_like(F)
    elif motion in ("right", "left"):
        K11, K12, K22 = (float(np.asarray(k)) for k in acoustic_stiffness(m, ps, 0.0, 0.0))
        w, Q = np.linalg.eigh(np.array([[K11, K12], [K12, K22]]) / m.rho)
        if np.min(w) < 0:
            raise HyperbolicityError("unstrained state is not hyperbolic")
        S = (Q * np.sqrt(w)) @ Q.T
        sign = -1.0 if motion == "right" else 1.0
        V = sign * (S[0, 0] * F + S[0, 1] * G)
        W = sign * (S[1, 0] * F + S[1, 1] * G)
    else:
        raise ValueError(f"motion must be 'right', 'left' or 'rest', got {motion!r}")
    return WaveState(grid, F, G, V, W, 0.0)


def displacements(state: WaveState):
    """``(f, g)`` at cell centres by trapezoidal integration, ``f = g = 0`` at the first centre."""
    dx = state.grid.dx

    def integ(q):
        return np.concatenate([[0.0], np.cumsum(0.5 * (q[1:] + q[:-1]) * dx)])

    return integ(state.F), integ(state.G)


def l2_norm(values, dx: float) -> float:
    """Discrete L2 norm ``sqrt(sum v^2 dx)`` (summed over leading axes)."""
    v = np.asarray(values, dtype=float)
    return float(np.sqrt(np.sum(v * v) * dx))
