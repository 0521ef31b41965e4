"""Command-line entry point: ``shearwave <subcommand> --config <path> --out <dir>``.

Each subcommand reads a JSON :class:`~shearwave.config.RunConfig`, runs one
computation and writes ``<out>/meta.json`` (config echo plus derived
quantities).  Field-producing modes also write ``<out>/snapshots.csv``.

Exit codes: 0 success, 2 config syntax, 3 config schema, 4 physical
invariant, 5 runtime failure inside a module.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import asymptotics as asy
from .compare import Scenario, compare_asymptotic_to_full, detect_regime
from .config import MODES, ConfigError, RunConfig, load_config, to_dict
from .hyperbolic_core import (Grid1D, SolverConfig, cell_average, displacements, initial_state,
                              max_wavespeed, run)
from .kinematics import make_triad, prestrain_from_F
from .materials import MooneyRivlin, QuadraticI1, acoustic_stiffness, modulus_expansion
from .mr_exact import Gaussian, Sampled, Sine, assemble_mr_system, bh_polarization, \
    positivity_certificate, rotation

__all__ = ["main", "execute", "build_parser"]

log = logging.getLogger("shearwave")

EXIT_OK, EXIT_RUNTIME = 0, 5
LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
CSV_NAME, META_NAME = "snapshots.csv", "meta.json"


# ------------------------------------------------------------------ builders


def _material(cfg: RunConfig):
    sec = cfg.material
    if sec.model == "mooney_rivlin":
        return MooneyRivlin(sec.param("C"), sec.param("E"), sec.rho)
    return QuadraticI1(sec.param("mu0"), sec.param("kappa"), sec.rho)


def _prestrain(cfg: RunConfig):
    F = np.array(cfg.prestrain.F)
    triad = make_triad(np.array(cfg.direction.n), cfg.direction.a_hint)
    return prestrain_from_F(F, triad)


def _profile(cfg: RunConfig, length: float, periodic: bool):
    """Unit-height initial profile as a function of one variable."""
    ini = cfg.initial
    height = ini.param("height", 1.0)
    if ini.profile == "gaussian":
        return Gaussian(height, ini.param("center", 0.5 * length),
                        ini.param("width", 0.1 * length), period=length if periodic else None)
    if ini.profile == "sine":
        return Sine(height, ini.param("wavenumber", 2 * math.pi / length), ini.param("phase", 0.0))
    path = Path(ini.param("path"))
    if not path.is_absolute():
        path = Path(cfg.base_dir) / path
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"{path}: sampled profile needs two columns (x, value)")
    return Sampled(data[:, 0], data[:, 1], period=length if periodic else None)


# ------------------------------------------------------------------ output


def _clean(obj):
    """JSON-ready copy: numpy scalars/arrays to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


def _fmt(x) -> str:
    return repr(float(x))


def _write_csv(path: Path, header, rows) -> int:
    count = 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([r if isinstance(r, (int, np.integer)) else _fmt(r) for r in row])
            count += 1
    return count


def _field_rows(t, x, columns):
    for i in range(len(x)):
        yield (t, i, x[i], *(col[i] for col in columns))


def _write_meta(out: Path, cfg: RunConfig, derived: dict, outputs: dict):
    meta = {
        "tool": "shearwave",
        "version": __version__,
        "mode": cfg.mode,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "config": to_dict(cfg),
        "derived": derived,
        "outputs": outputs,
    }
    with open(out / META_NAME, "w") as fh:
        json.dump(_clean(meta), fh, indent=2)
        fh.write("\n")


# ------------------------------------------------------------------ modes


def _stiffness_summary(m, ps):
    K11, K12, K22 = (float(np.asarray(k)) for k in acoustic_stiffness(m, ps, 0.0, 0.0))
    K = np.array([[K11, K12], [K12, K22]])
    w, Q = np.linalg.eigh(K)
    lam1, lam2 = float(w[1]), float(w[0])
    v = Q[:, 1] * np.sign(Q[0, 1] if Q[0, 1] != 0 else 1.0)
    return {"matrix": K, "lambda1": lam1, "lambda2": lam2,
            "theta": float(math.atan2(v[1], v[0])),
            "c1": math.sqrt(max(lam1, 0.0) / m.rho), "c2": math.sqrt(max(lam2, 0.0) / m.rho)}


def _mode_speeds(cfg, out):
    m, ps = _material(cfg), _prestrain(cfg)
    derived = {"triad": {"n": ps.triad.n, "a": ps.triad.a, "b": ps.triad.b}}
    if isinstance(m, MooneyRivlin):
        ms = assemble_mr_system(m.C, m.E, m.rho, ps)
        lhs, cross = positivity_certificate(ps, m.C, m.E)
        derived.update(matrix=ms.matrix, lambda1=ms.lambda1, lambda2=ms.lambda2,
                       theta=ms.theta, c1=ms.c1, c2=ms.c2,
                       positivity_lhs=lhs, positivity_cross_term=cross)
    else:
        derived.update(_stiffness_summary(m, ps))
        derived["note"] = "linearised speeds at the unstrained wave state"
    return derived, {}


def _mode_bh(cfg, out):
    F = np.array(cfg.prestrain.F)
    res = bh_polarization(F @ F.T, np.array(cfg.direction.n))
    ps = prestrain_from_F(F, res.triad)
    derived = {"triad": {"n": res.triad.n, "a": res.triad.a, "b": res.triad.b},
               "residual": res.residual, "isotropic_section": res.isotropic,
               "aBib": ps.aBib, "aBia": ps.aBia, "bBib": ps.bBib}
    if cfg.material is not None and cfg.material.model == "mooney_rivlin":
        m = _material(cfg)
        ms = assemble_mr_system(m.C, m.E, m.rho, ps)
        derived.update(lambda1=ms.lambda1, lambda2=ms.lambda2, theta=ms.theta,
                       c1=ms.c1, c2=ms.c2)
    return derived, {}


def _mode_simulate(cfg, out):
    m, ps = _material(cfg), _prestrain(cfg)
    g = cfg.grid
    grid = Grid1D(g.n_cells, g.length, g.boundary)
    prof = _profile(cfg, g.length, g.boundary == "periodic")
    state0 = initial_state(m, ps, grid, prof, cfg.initial.amplitude,
                           cfg.initial.polarization, cfg.initial.motion)
    s = cfg.solver
    scfg = SolverConfig(cfl=s.cfl, scheme=s.scheme, t_end=s.t_end,
                        snapshot_stride=s.snapshot_stride, limiter=s.limiter, tvb_m=s.tvb_m)
    snaps = run(m, ps, state0, scfg)

    def rows():
        for st in snaps:
            f, gg = displacements(st)
            yield from _field_rows(st.t, grid.centers, (st.F, st.G, st.V, st.W, f, gg))

    n = _write_csv(out / CSV_NAME, ("t", "cell", "eta", "F", "G", "V", "W", "f", "g"), rows())
    first, last = snaps[0], snaps[-1]
    derived = {
        "n_snapshots": len(snaps),
        "t_final": last.t,
        "max_wavespeed_initial": max_wavespeed(m, ps, first),
        "integral_F_drift": float(np.sum(last.F - first.F) * grid.dx),
        "integral_G_drift": float(np.sum(last.G - first.G) * grid.dx),
        "speeds": _stiffness_summary(m, ps),
    }
    if isinstance(m, MooneyRivlin):
        ms = assemble_mr_system(m.C, m.E, m.rho, ps)
        derived.update(lambda1=ms.lambda1, lambda2=ms.lambda2, theta=ms.theta,
                       c1=ms.c1, c2=ms.c2)
    return derived, {"csv": CSV_NAME, "rows": n}


def _slow_grid(cfg):
    return Grid1D(cfg.asymptotic.n_cells, cfg.grid.length)


def _riemann_samples(pexp, grid, times, states, count=8):
    idx = np.linspace(0, grid.n_cells - 1, count).round().astype(int)
    out = []
    for t, u in ((times[0], states[0]), (times[-1], states[-1])):
        R, S = asy.riemann_invariants(pexp, u[0, idx], u[1, idx])
        out.append({"tau": t, "x": grid.centers[idx], "R": R, "S": S})
    return out


def _mode_asymptotic(cfg, out):
    m, ps = _material(cfg), _prestrain(cfg)
    eps, tau_end = cfg.initial.amplitude, cfg.asymptotic.tau_end
    regime = cfg.asymptotic.regime
    if regime == "auto":
        regime = detect_regime(m, ps, eps)
    grid = _slow_grid(cfg)
    base = cell_average(_profile(cfg, grid.length, True), grid)
    pol = np.asarray(cfg.initial.polarization, dtype=float)
    s = cfg.solver
    kw = dict(cfl=s.cfl, scheme=s.scheme, stride=s.snapshot_stride, tvb_m=s.tvb_m,
              limiter=s.limiter)
    derived: dict = {"regime": regime, "epsilon": eps}

    if regime == "linear":
        if not isinstance(m, MooneyRivlin):
            raise asy.RegimeError("linear regime is exact only for Mooney-Rivlin")
        ms = assemble_mr_system(m.C, m.E, m.rho, ps)
        derived.update(lambda1=ms.lambda1, lambda2=ms.lambda2, theta=ms.theta,
                       c1=ms.c1, c2=ms.c2, mu1=modulus_expansion(m).mu1,
                       mode_vector=rotation(ms.theta)[cfg.asymptotic.mode - 1])
        times, fields, names = [0.0, tau_end], [base, base], ("psi",)
        fields = [f[None, :] for f in fields]
    elif regime == "generic":
        exp = asy.generic_expansion(m, ps)
        mode = cfg.asymptotic.mode
        coeff = exp.psi_coeff if mode == 2 else 0.0
        snaps = asy.burgers_run(coeff, base, tau_end, grid, **kw)
        times = [sn.tau for sn in snaps]
        fields = [sn.values[None, :] for sn in snaps]
        names = ("psi",)
        derived.update(w1=exp.w1, w2=exp.w2, M=exp.M, alpha1_sq=exp.alpha1_sq,
                       alpha2_sq=exp.alpha2_sq, v1=exp.v1, v2=exp.v2,
                       burgers_coeff=exp.burgers_coeff, psi_coeff=exp.psi_coeff,
                       mode=mode, mode_coeff=coeff,
                       shock_time=asy.shock_time(coeff * base, grid))
    elif regime == "temple":
        if not np.allclose(ps.Bbar, np.eye(3), rtol=0, atol=1e-12):
            raise asy.RegimeError("temple regime requires no pre-strain (Bbar = I)")
        mu0, mu1 = modulus_expansion(m)
        beta = asy.temple_beta(m)
        times, fields = asy.temple_run(beta, base * pol[0], base * pol[1], tau_end, grid, **kw)
        names = ("F", "G")
        derived.update(mu0=mu0, mu1=mu1, beta=beta)
    elif regime == "principal":
        pexp = asy.principal_expansion(m, ps, epsilon=eps)
        times, fields = asy.coupled_run(pexp, base * pol[0], base * pol[1], tau_end, grid, **kw)
        names = ("F", "G")
        lam1 = [float(np.min(pexp.nBn * pexp.Lambda(u[0], u[1]))) for u in fields]
        derived.update(a=pexp.a_s, b=pexp.b_s, nBn=pexp.nBn, alpha=pexp.alpha,
                       flux_coeff=pexp.flux_coeff,
                       riemann_samples=_riemann_samples(pexp, grid, times, fields),
                       lambda1_min=min(lam1),
                       lambda1_sign_change=bool(min(lam1) < 0 < max(
                           float(np.max(pexp.nBn * pexp.Lambda(u[0], u[1]))) for u in fields)))
    else:
        raise asy.RegimeError(f"unknown regime {regime!r}")

    def rows():
        for t, u in zip(times, fields):
            yield from _field_rows(t, grid.centers, tuple(u))

    n = _write_csv(out / CSV_NAME, ("tau", "cell", "x", *names), rows())
    derived["n_snapshots"] = len(times)
    return derived, {"csv": CSV_NAME, "rows": n}


def _mode_compare(cfg, out):
    m, ps = _material(cfg), _prestrain(cfg)
    a, s = cfg.asymptotic, cfg.solver
    sc = Scenario(
        material=m, prestrain=ps, epsilon=cfg.initial.amplitude,
        profile=_profile(cfg, cfg.grid.length, True), tau_end=a.tau_end,
        x_length=cfg.grid.length, regime=a.regime, polarization=cfg.initial.polarization,
        mode=a.mode, n_cells=cfg.grid.n_cells, n_cells_asymptotic=a.n_cells,
        cfl=s.cfl, scheme=s.scheme, limiter=s.limiter, tvb_m=s.tvb_m,
    )
    rep = compare_asymptotic_to_full(sc)
    if rep.asymptotic.shape[0] == 1:
        header = ("tau", "cell", "x", "psi", "psi_full")
    else:
        header = ("tau", "cell", "x", "F", "G", "F_full", "G_full")
    cols = tuple(rep.asymptotic) + tuple(rep.full)
    n = _write_csv(out / CSV_NAME, header, _field_rows(rep.tau, rep.x, cols))
    return rep.summary(), {"csv": CSV_NAME, "rows": n}


def _mode_degeneracy(cfg, out):
    m, ps = _material(cfg), _prestrain(cfg)
    exp = asy.generic_expansion(m, ps)
    samples = np.linspace(-1.0, 1.0, 9)
    d1, d2 = asy.degeneracy_check(exp, samples, samples)
    r2 = exp.w1 ** 2 + exp.w2 ** 2
    derived = {
        "w1": exp.w1, "w2": exp.w2, "nBn": exp.nBn, "kappa": exp.kappa, "c": exp.c, "M": exp.M,
        "alpha1_sq": exp.alpha1_sq, "alpha2_sq": exp.alpha2_sq,
        "v1": exp.v1, "v2": exp.v2,
        "samples": samples, "d1": d1, "d2": d2,
        "d1_max_abs": float(np.max(np.abs(d1))),
        "d2_expected": 3 * r2 * r2 * samples,
        "mode1": "linearly degenerate",
        "mode2": "genuinely nonlinear" if exp.burgers_coeff != 0 else "linearly degenerate",
        "burgers_coeff": exp.burgers_coeff, "psi_coeff": exp.psi_coeff,
    }
    return derived, {}


DISPATCH = {
    "speeds": _mode_speeds,
    "bh-triad": _mode_bh,
    "simulate": _mode_simulate,
    "asymptotic": _mode_asymptotic,
    "compare": _mode_compare,
    "degeneracy": _mode_degeneracy,
}


def execute(cfg: RunConfig, out) -> int:
    """Run ``cfg`` and write its outputs under ``out``; returns the exit code."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    derived, outputs = DISPATCH[cfg.mode](cfg, out)
    _write_meta(out, cfg, derived, outputs)
    log.info("%s: wrote %s", cfg.mode, out)
    return EXIT_OK


# ------------------------------------------------------------------ entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shearwave",
                                description="Shear waves in pre-strained incompressible solids.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for mode in MODES:
        sp = sub.add_parser(mode)
        sp.add_argument("--config", required=True, help="JSON run configuration")
        sp.add_argument("--out", required=True, help="output directory")
    return p


def _setup_logging():
    name = os.environ.get("SHEARWAVE_LOG", "error").lower()
    level = LOG_LEVELS.get(name, logging.ERROR)
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s %(name)s: %(message)s", force=True)
    if name not in LOG_LEVELS:
        log.error("unknown SHEARWAVE_LOG=%r, using 'error'", name)


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, mode=args.command)
    except ConfigError as exc:
        print(f"shearwave: {args.config}: {exc}", file=sys.stderr)
        return exc.exit_code
    try:
        return execute(cfg, args.out)
    except Exception as exc:  # module failures map to one exit code
        log.debug("traceback", exc_info=True)
        print(f"shearwave: {cfg.mode} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
