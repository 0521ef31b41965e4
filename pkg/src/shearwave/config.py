"""JSON run configuration: parsing, validation and serialisation."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "ConfigError",
    "ConfigSyntaxError",
    "ConfigSchemaError",
    "ConfigPhysicsError",
    "MODES",
    "RunConfig",
    "parse_config",
    "serialize",
]

MODES = ("speeds", "bh-triad", "simulate", "asymptotic", "compare", "degeneracy")
MODELS = ("mooney_rivlin", "quadratic_i1")
PROFILES = ("gaussian", "sine", "sampled-file")


class ConfigError(ValueError):
    exit_code = 1


class ConfigSyntaxError(ConfigError):
    exit_code = 2


class ConfigSchemaError(ConfigError):
    exit_code = 3


class ConfigPhysicsError(ConfigError):
    exit_code = 4


@dataclass(frozen=True)
class MaterialSection:
    model: str
    params: tuple[tuple[str, float], ...]
    rho: float = 1.0

    def param(self, name: str) -> float:
        return dict(self.params)[name]


@dataclass(frozen=True)
class PrestrainSection:
    F: tuple[tuple[float, float, float], ...] = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))


@dataclass(frozen=True)
class DirectionSection:
    n: tuple[float, float, float] = (1.0, 0.0, 0.0)
    a_hint: tuple[float, float, float] | None = None


@dataclass(frozen=True)
class GridSection:
    n_cells: int = 512
    length: float = 2 * math.pi
    boundary: str = "periodic"


@dataclass(frozen=True)
class SolverSection:
    scheme: str = "muscl_minmod"
    cfl: float = 0.8
    t_end: float = 1.0
    snapshot_stride: int = 100
    limiter: str = "minmod"
    tvb_m: float = 0.0


@dataclass(frozen=True)
class InitialSection:
    profile: str = "sine"
    amplitude: float = 0.01
    polarization: tuple[float, float] = (1.0, 0.0)
    params: tuple[tuple[str, object], ...] = ()
    motion: str = "right"

    def param(self, name: str, default=None):
        return dict(self.params).get(name, default)


@dataclass(frozen=True)
class AsymptoticSection:
    regime: str = "auto"
    tau_end: float = 0.5
    n_cells: int = 512
    mode: int = 2


@dataclass(frozen=True)
class RunConfig:
    mode: str
    material: MaterialSection | None = None
    prestrain: PrestrainSection = field(default_factory=PrestrainSection)
    direction: DirectionSection = field(default_factory=DirectionSection)
    grid: GridSection = field(default_factory=GridSection)
    solver: SolverSection = field(default_factory=SolverSection)
    initial: InitialSection = field(default_factory=InitialSection)
    asymptotic: AsymptoticSection = field(default_factory=AsymptoticSection)
    base_dir: str = field(default=".", compare=False)


# ------------------------------------------------------------------ helpers


class _Ctx:
    def __init__(self, text: str):
        self.lines = text.splitlines()

    def line_of(self, key: str) -> str:
        needle = f'"{key}"'
        for i, line in enumerate(self.lines, 1):
            if needle in line:
                return f"line {i}"
        return "line ?"

    def schema(self, key, msg):
        return ConfigSchemaError(f"{self.line_of(key)}: {key}: {msg}")

    def physics(self, key, msg):
        return ConfigPhysicsError(f"{self.line_of(key)}: {key}: {msg}")


def _section(ctx, raw, name, allowed, required=()):
    sec = raw.get(name)
    if sec is None:
        return None
    if not isinstance(sec, dict):
        raise ctx.schema(name, "must be an object")
    unknown = sorted(set(sec) - set(allowed))
    if unknown:
        raise ctx.schema(unknown[0], f"unknown key in section '{name}'")
    for key in required:
        if key not in sec:
            raise ctx.schema(name, f"missing required key '{key}'")
    return sec


def _num(ctx, sec, key, default=None, integer=False):
    if key not in sec:
        if default is None:
            raise ctx.schema(key, "required")
        return default
    val = sec[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ctx.schema(key, "must be a number")
    if integer:
        if isinstance(val, float) and not val.is_integer():
            raise ctx.schema(key, "must be an integer")
        return int(val)
    if not math.isfinite(val):
        raise ctx.schema(key, "must be finite")
    return float(val)


def _vec(ctx, sec, key, length):
    val = sec[key]
    if (not isinstance(val, list) or len(val) != length
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in val)):
        raise ctx.schema(key, f"must be a list of {length} numbers")
    return tuple(float(v) for v in val)


def _choice(ctx, sec, key, choices, default):
    val = sec.get(key, default)
    if val not in choices:
        raise ctx.schema(key, f"must be one of {list(choices)}, got {val!r}")
    return val


# ------------------------------------------------------------------ parsing

_TOP = ("mode", "material", "prestrain", "direction", "grid", "solver", "initial", "asymptotic")
_MODEL_PARAMS = {"mooney_rivlin": ("C", "E"), "quadratic_i1": ("mu0", "kappa")}


def parse_config(text: str, mode: str | None = None, base_dir: str = ".") -> RunConfig:
    """Parse and validate configuration text.

    ``mode`` (from the command line) must agree with a ``"mode"`` key if both
    are present.  Raises a :class:`ConfigError` subclass whose ``exit_code``
    is 2 (syntax), 3 (schema) or 4 (physical invariant).
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigSyntaxError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from exc
    ctx = _Ctx(text)
    if not isinstance(raw, dict):
        raise ConfigSchemaError("line 1: top level must be an object")
    unknown = sorted(set(raw) - set(_TOP))
    if unknown:
        raise ctx.schema(unknown[0], "unknown top-level key")

    cfg_mode = raw.get("mode")
    if cfg_mode is not None and mode is not None and cfg_mode != mode:
        raise ctx.schema("mode", f"config says {cfg_mode!r} but subcommand is {mode!r}")
    mode = mode or cfg_mode
    if mode not in MODES:
        raise ctx.schema("mode", f"must be one of {list(MODES)}, got {mode!r}")

    material = None
    sec = _section(ctx, raw, "material", ("model", "rho", "C", "E", "mu0", "kappa"), ("model",))
    if sec is not None:
        model = _choice(ctx, sec, "model", MODELS, None)
        names = _MODEL_PARAMS[model]
        extra = sorted(set(sec) - {"model", "rho", *names})
        if extra:
            raise ctx.schema(extra[0], f"not a parameter of model {model!r}")
        params = tuple((k, _num(ctx, sec, k)) for k in names)
        rho = _num(ctx, sec, "rho", 1.0)
        material = MaterialSection(model, params, rho)
        if rho <= 0:
            raise ctx.physics("rho", "density must be positive")
        p = dict(params)
        if model == "mooney_rivlin":
            if p["C"] <= 0:
                raise ctx.physics("C", "Mooney-Rivlin requires C > 0")
            if p["E"] < 0:
                raise ctx.physics("E", "Mooney-Rivlin requires E >= 0")
        else:
            if p["mu0"] <= 0:
                raise ctx.physics("mu0", "shear modulus mu0 must be positive")
            if p["kappa"] <= 0:
                raise ctx.physics("kappa", "nonlinearity parameter kappa must be positive")
    elif mode in ("speeds", "simulate", "asymptotic", "compare", "degeneracy"):
        raise ctx.schema("material", f"section required for mode {mode!r}")

    prestrain = PrestrainSection()
    sec = _section(ctx, raw, "prestrain", ("F",))
    if sec is not None and "F" in sec:
        rows = sec["F"]
        if not isinstance(rows, list) or len(rows) != 3:
            raise ctx.schema("F", "must be a 3x3 nested list (row-major)")
        F = tuple(_vec(ctx, {"F": r}, "F", 3) for r in rows)
        prestrain = PrestrainSection(F)
        det = float(np.linalg.det(np.array(F)))
        if abs(det - 1.0) > 1e-10:
            raise ctx.physics("F", f"incompressibility constraint violated: det F = {det!r}, must be 1")

    direction = DirectionSection()
    sec = _section(ctx, raw, "direction", ("n", "a_hint"), ("n",))
    if sec is not None:
        n = _vec(ctx, sec, "n", 3)
        a_hint = _vec(ctx, sec, "a_hint", 3) if sec.get("a_hint") is not None else None
        direction = DirectionSection(n, a_hint)
        norm = math.sqrt(sum(v * v for v in n))
        if abs(norm - 1.0) > 1e-8:
            raise ctx.physics("n", f"propagation direction must be a unit vector, |n| = {norm!r}")
        if a_hint is not None:
            cross = np.cross(n, a_hint)
            if np.linalg.norm(cross) <= 1e-8 * np.linalg.norm(a_hint):
                raise ctx.physics("a_hint", "polarisation hint is parallel to n")

    grid = GridSection()
    sec = _section(ctx, raw, "grid", ("n_cells", "length", "boundary"))
    if sec is not None:
        grid = GridSection(
            n_cells=_num(ctx, sec, "n_cells", GridSection.n_cells, integer=True),
            length=_num(ctx, sec, "length", GridSection.length),
            boundary=_choice(ctx, sec, "boundary", ("periodic", "transmissive"), "periodic"),
        )
        if grid.n_cells < 16:
            raise ctx.physics("n_cells", "at least 16 cells are required")
        if grid.length <= 0:
            raise ctx.physics("length", "domain length must be positive")

    solver = SolverSection()
    sec = _section(ctx, raw, "solver", ("scheme", "cfl", "t_end", "snapshot_stride", "limiter", "tvb_m"))
    if sec is not None:
        solver = SolverSection(
            scheme=_choice(ctx, sec, "scheme", ("rusanov", "muscl_minmod"), "muscl_minmod"),
            cfl=_num(ctx, sec, "cfl", SolverSection.cfl),
            t_end=_num(ctx, sec, "t_end", SolverSection.t_end),
            snapshot_stride=_num(ctx, sec, "snapshot_stride", SolverSection.snapshot_stride,
                                 integer=True),
            limiter=_choice(ctx, sec, "limiter", ("minmod", "none"), "minmod"),
            tvb_m=_num(ctx, sec, "tvb_m", SolverSection.tvb_m),
        )
        if not 0.0 < solver.cfl < 1.0:
            raise ctx.physics("cfl", "CFL number must lie in (0, 1)")
        if solver.t_end < 0:
            raise ctx.physics("t_end", "end time must be non-negative")
        if solver.snapshot_stride < 1:
            raise ctx.physics("snapshot_stride", "must be at least 1")
        if solver.tvb_m < 0:
            raise ctx.physics("tvb_m", "must be non-negative")

    initial = InitialSection()
    sec = _section(ctx, raw, "initial", ("profile", "amplitude", "polarization", "params", "motion"))
    if sec is not None:
        params = sec.get("params", {})
        if not isinstance(params, dict):
            raise ctx.schema("params", "must be an object")
        profile = _choice(ctx, sec, "profile", PROFILES, "sine")
        allowed = {"gaussian": ("center", "width", "height"),
                   "sine": ("wavenumber", "phase", "height"),
                   "sampled-file": ("path",)}[profile]
        extra = sorted(set(params) - set(allowed))
        if extra:
            raise ctx.schema(extra[0], f"not a parameter of profile {profile!r}")
        clean = []
        for k in allowed:
            if k in params:
                if k == "path":
                    if not isinstance(params[k], str):
                        raise ctx.schema(k, "must be a string")
                    clean.append((k, params[k]))
                else:
                    clean.append((k, _num(ctx, params, k)))
        if profile == "sampled-file" and "path" not in params:
            raise ctx.schema("params", "sampled-file profile needs 'path'")
        initial = InitialSection(
            profile=profile,
            amplitude=_num(ctx, sec, "amplitude", InitialSection.amplitude),
            polarization=_vec(ctx, sec, "polarization", 2) if "polarization" in sec else (1.0, 0.0),
            params=tuple(clean),
            motion=_choice(ctx, sec, "motion", ("right", "left", "rest"), "right"),
        )
        if initial.amplitude < 0:
            raise ctx.physics("amplitude", "amplitude epsilon must be non-negative")
        if not any(initial.polarization):
            raise ctx.physics("polarization", "polarisation vector must be nonzero")
        if initial.param("width") is not None and initial.param("width") <= 0:
            raise ctx.physics("width", "Gaussian width must be positive")

    asymptotic = AsymptoticSection()
    sec = _section(ctx, raw, "asymptotic", ("regime", "tau_end", "n_cells", "mode"))
    if sec is not None:
        asymptotic = AsymptoticSection(
            regime=_choice(ctx, sec, "regime", ("auto", "linear", "temple", "generic", "principal"),
                           "auto"),
            tau_end=_num(ctx, sec, "tau_end", AsymptoticSection.tau_end),
            n_cells=_num(ctx, sec, "n_cells", AsymptoticSection.n_cells, integer=True),
            mode=_num(ctx, sec, "mode", AsymptoticSection.mode, integer=True),
        )
        if asymptotic.tau_end < 0:
            raise ctx.physics("tau_end", "slow end time must be non-negative")
        if asymptotic.n_cells < 16:
            raise ctx.physics("n_cells", "at least 16 cells are required")
        if asymptotic.mode not in (1, 2):
            raise ctx.physics("mode", "mode must be 1 or 2")

    return RunConfig(mode, material, prestrain, direction, grid, solver, initial, asymptotic,
                     base_dir=base_dir)


def load_config(path, mode: str | None = None) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigSyntaxError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, mode, base_dir=str(path.parent))


def to_dict(cfg: RunConfig) -> dict:
    out: dict = {"mode": cfg.mode}
    if cfg.material is not None:
        out["material"] = {"model": cfg.material.model, **dict(cfg.material.params),
                           "rho": cfg.material.rho}
    out["prestrain"] = {"F": [list(r) for r in cfg.prestrain.F]}
    d = {"n": list(cfg.direction.n)}
    if cfg.direction.a_hint is not None:
        d["a_hint"] = list(cfg.direction.a_hint)
    out["direction"] = d
    out["grid"] = asdict(cfg.grid)
    out["solver"] = asdict(cfg.solver)
    ini = asdict(cfg.initial)
    ini["polarization"] = list(cfg.initial.polarization)
    ini["params"] = dict(cfg.initial.params)
    out["initial"] = ini
    out["asymptotic"] = asdict(cfg.asymptotic)
    return out


def serialize(cfg: RunConfig) -> str:
    return json.dumps(to_dict(cfg), indent=2)
