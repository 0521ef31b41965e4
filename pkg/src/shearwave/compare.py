"""Run the full equations of motion next to the matching amplitude equation.

A :class:`Scenario` describes a wave of amplitude ``epsilon`` in the slow,
co-moving variables.  :func:`compare_asymptotic_to_full` builds the physical
initial data, runs :func:`shearwave.hyperbolic_core.run` to ``t = tau_end /
eps^k``, samples the result at ``eta = alpha (x + c t)``, projects it onto
the relevant mode and measures the distance to the amplitude equation.

Regimes
-------
``linear``    Mooney-Rivlin: exact d'Alembert transport along a normal mode.
``temple``    no pre-strain, any material: cubic Temple pair, ``tau = eps^2 t``.
``generic``   QuadraticI1, ``n.B a``, ``n.B b`` of order one: Burgers, ``tau = eps t``.
``principal`` QuadraticI1 near a principal axis: coupled system, ``tau = eps^2 t``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from . import asymptotics as asy
from .hyperbolic_core import Grid1D, SolverConfig, cell_average, initial_state, l2_norm, run
from .kinematics import Prestrain
from .materials import Material, MooneyRivlin, QuadraticI1, modulus_expansion
from .mr_exact import assemble_mr_system, rotation

__all__ = ["Scenario", "ErrorReport", "detect_regime", "compare_asymptotic_to_full"]

log = logging.getLogger(__name__)

REGIMES = ("auto", "linear", "temple", "generic", "principal")
IDENTITY_TOL = 1e-12


@dataclass(frozen=True)
class Scenario:
    """Inputs of one asymptotic-vs-full comparison.

    ``profile`` is the initial amplitude as a function of the slow variable
    ``x`` on the periodic interval ``[0, x_length)``.  For the two-component
    regimes (``temple``, ``principal``) the initial ``(F, G)`` is
    ``profile(x) * polarization``; for ``generic`` and ``linear`` the profile
    is the amplitude of the selected mode.
    """

    material: Material
    prestrain: Prestrain
    epsilon: float
    profile: Callable[[np.ndarray], np.ndarray]
    tau_end: float
    x_length: float = 2 * np.pi
    regime: str = "auto"
    polarization: tuple[float, float] = (1.0, 0.0)
    mode: int = 2
    n_cells: int = 512
    n_cells_asymptotic: int = 512
    cfl: float = 0.8
    scheme: str = "muscl_minmod"
    limiter: str = "minmod"
    tvb_m: float = 0.0
    beta_scale: float = 1.0
    coeff_override: float | None = None


@dataclass
class ErrorReport:
    regime: str
    epsilon: float
    tau: float
    t_physical: float
    l2_abs: float
    l2_rel: float
    linf_abs: float
    linf_rel: float
    x: np.ndarray = field(repr=False)
    asymptotic: np.ndarray = field(repr=False)
    full: np.ndarray = field(repr=False)
    derived: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "regime": self.regime,
            "epsilon": self.epsilon,
            "tau": self.tau,
            "t_physical": self.t_physical,
            "l2_abs": self.l2_abs,
            "l2_rel": self.l2_rel,
            "linf_abs": self.linf_abs,
            "linf_rel": self.linf_rel,
            **self.derived,
        }


def _is_identity(B) -> bool:
    return bool(np.max(np.abs(np.asarray(B) - np.eye(3))) <= IDENTITY_TOL)


def detect_regime(m: Material, ps: Prestrain, epsilon: float) -> str:
    if isinstance(m, MooneyRivlin):
        return "linear"
    if _is_identity(ps.Bbar):
        return "temple"
    if not isinstance(m, QuadraticI1):
        raise asy.RegimeError("pre-strained expansions need the QuadraticI1 model")
    if max(abs(ps.nBa), abs(ps.nBb)) <= 10 * max(epsilon, 0.0):
        return "principal"
    return "generic"


def _check_regime(regime, m, ps):
    if regime == "linear" and not isinstance(m, MooneyRivlin):
        raise asy.RegimeError("linear regime is exact only for Mooney-Rivlin")
    if regime == "temple" and not _is_identity(ps.Bbar):
        raise asy.RegimeError("temple regime requires no pre-strain (Bbar = I)")
    if regime in ("generic", "principal") and not isinstance(m, QuadraticI1):
        raise asy.RegimeError(f"{regime} regime requires the QuadraticI1 model")
    if regime == "generic" and ps.nBa == 0.0 and ps.nBb == 0.0:
        raise asy.RegimeError("generic regime needs n.B a or n.B b nonzero")


def _frame_sampler(state, alpha: float, speed: float, t: float):
    """Periodic cubic interpolant of ``(F, G)`` evaluated at ``eta = alpha (x + c t)``."""
    grid = state.grid
    xc = np.append(grid.centers, grid.centers[0] + grid.length)
    splines = [CubicSpline(xc, np.append(q, q[0]), bc_type="periodic") for q in (state.F, state.G)]

    def at(x):
        eta = grid.origin + np.mod(alpha * (x + speed * t) - grid.origin, grid.length)
        return np.vstack([s(eta) for s in splines])

    return at


def compare_asymptotic_to_full(sc: Scenario) -> ErrorReport:
    if sc.regime not in REGIMES:
        raise ValueError(f"regime must be one of {REGIMES}")
    m, ps, eps = sc.material, sc.prestrain, float(sc.epsilon)
    regime = detect_regime(m, ps, eps) if sc.regime == "auto" else sc.regime
    _check_regime(regime, m, ps)

    xgrid = Grid1D(sc.n_cells_asymptotic, sc.x_length)
    x = xgrid.centers
    derived: dict = {}

    # frame (alpha, c), slow-time exponent, mode vector and asymptotic solver
    if regime == "linear":
        ms = assemble_mr_system(m.C, m.E, m.rho, ps)
        R = rotation(ms.theta)
        vec = R[0] if sc.mode == 1 else R[1]
        speed_phys = ms.c1 if sc.mode == 1 else ms.c2
        c = float(np.sqrt(modulus_expansion(m).mu0 / m.rho))
        alpha = speed_phys / c
        power = 1
        derived.update(lambda1=ms.lambda1, lambda2=ms.lambda2, theta=ms.theta)
    elif regime == "temple":
        mu0, mu1 = modulus_expansion(m)
        c = float(np.sqrt(mu0 / m.rho))
        alpha, power, vec = 1.0, 2, None
        beta = asy.temple_beta(m) * sc.beta_scale
        derived.update(mu0=mu0, mu1=mu1, beta=beta)
    elif regime == "generic":
        exp = asy.generic_expansion(m, ps)
        c = exp.c
        alpha = float(np.sqrt(exp.alpha2_sq if sc.mode == 2 else exp.alpha1_sq))
        vec = np.array([exp.w1, exp.w2]) if sc.mode == 2 else np.array([exp.w2, -exp.w1])
        power = 1
        coeff = exp.psi_coeff if sc.mode == 2 else 0.0
        if sc.coeff_override is not None:
            coeff = sc.coeff_override
        derived.update(alpha1_sq=exp.alpha1_sq, alpha2_sq=exp.alpha2_sq,
                       burgers_coeff=exp.burgers_coeff, psi_coeff=coeff)
    else:
        pexp = asy.principal_expansion(m, ps, epsilon=eps)
        c, alpha, power, vec = pexp.c, pexp.alpha, 2, None
        derived.update(a=pexp.a_s, b=pexp.b_s, alpha=pexp.alpha, flux_coeff=pexp.flux_coeff)

    t_end = sc.tau_end / eps ** power if eps > 0 else 0.0
    derived.update(alpha_frame=alpha, c=c)

    # initial data in slow variables
    base = cell_average(sc.profile, xgrid)
    if vec is None:
        pol = np.asarray(sc.polarization, dtype=float)
        asym0 = np.vstack([base * pol[0], base * pol[1]])
    else:
        asym0 = base[None, :]

    # asymptotic solution at tau_end
    if eps == 0.0:
        # no wave at all: both descriptions are identically zero
        asym = np.zeros_like(asym0)
    elif regime == "linear":
        asym = asym0.copy()
    elif regime == "generic":
        snaps = asy.burgers_run(coeff, base, sc.tau_end, xgrid, cfl=sc.cfl,
                                scheme=sc.scheme, stride=10 ** 9, tvb_m=sc.tvb_m,
                                limiter=sc.limiter)
        asym = snaps[-1].values[None, :]
    elif regime == "temple":
        _, states = asy.temple_run(beta, asym0[0], asym0[1], sc.tau_end, xgrid, cfl=sc.cfl,
                                   scheme=sc.scheme, stride=10 ** 9, tvb_m=sc.tvb_m,
                                   limiter=sc.limiter)
        asym = states[-1]
    else:
        _, states = asy.coupled_run(pexp, asym0[0], asym0[1], sc.tau_end, xgrid, cfl=sc.cfl,
                                    scheme=sc.scheme, stride=10 ** 9, tvb_m=sc.tvb_m,
                                    limiter=sc.limiter)
        asym = states[-1]

    # full solution with physical amplitude eps
    eta_grid = Grid1D(sc.n_cells, alpha * sc.x_length)
    if vec is None:
        prof_eta, pol_eta = (lambda e: sc.profile(e / alpha)), sc.polarization
    else:
        prof_eta, pol_eta = (lambda e: sc.profile(e / alpha)), tuple(vec)
    state0 = initial_state(m, ps, eta_grid, prof_eta, eps, pol_eta, motion="right")
    if eps == 0.0:
        final = state0
    else:
        cfg = SolverConfig(cfl=sc.cfl, scheme=sc.scheme, t_end=t_end, snapshot_stride=10 ** 9,
                           limiter=sc.limiter, tvb_m=sc.tvb_m)
        final = run(m, ps, state0, cfg)[-1]
    FG = _frame_sampler(final, alpha, c, final.t)(x)
    if eps == 0.0:
        full = np.zeros_like(asym)
    elif vec is None:
        full = FG / eps
    else:
        full = ((vec[0] * FG[0] + vec[1] * FG[1]) / (eps * float(vec @ vec)))[None, :]

    diff = full - asym
    ref_l2 = l2_norm(asym, xgrid.dx)
    ref_inf = float(np.max(np.abs(asym))) if asym.size else 0.0
    l2_abs = l2_norm(diff, xgrid.dx)
    linf_abs = float(np.max(np.abs(diff)))
    report = ErrorReport(
        regime=regime, epsilon=eps, tau=float(sc.tau_end), t_physical=float(t_end),
        l2_abs=l2_abs, l2_rel=l2_abs / ref_l2 if ref_l2 > 0 else 0.0,
        linf_abs=linf_abs, linf_rel=linf_abs / ref_inf if ref_inf > 0 else 0.0,
        x=x, asymptotic=asym, full=full, derived=derived,
    )
    log.info("compare %s eps=%g: l2_rel=%.3e linf_rel=%.3e", regime, eps,
             report.l2_rel, report.linf_rel)
    return report
