"""Strict JSON problem configuration.

Top-level keys: kind, space, operator, schedule, stop, family, oracle,
output, x1, seed, resolvent, gp. Unknown keys are rejected at every level
and all violations are collected before raising :class:`ConfigError`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from ..lp_space import SpaceSpec
from ..schedules import PowerSchedule, validate
from ..solver import StopRule

KINDS = ("zero", "minimize", "vi", "resolvent_path", "gradient_projection", "compare", "audit")
BUILTINS = ("power", "linear", "gradient")
FUNCTIONALS = ("quadratic", "quartic", "constant")
SET_KINDS = {"box": ("lo", "hi"), "ball": ("center", "radius"), "halfspace": ("normal", "offset")}

_KEYS = {
    None: {"kind", "space", "operator", "schedule", "stop", "family", "oracle", "output",
           "x1", "seed", "resolvent", "gp"},
    "space": {"n", "s", "p"},
    "operator": {"builtin", "matrix", "offset", "functional", "center", "finite_difference", "h"},
    "schedule": {"lambda0", "a", "theta0", "b"},
    "stop": {"tol_residual", "tol_step", "max_iter"},
    "oracle": {"enabled", "tol", "region"},
    "output": {"trace", "report", "record_coords", "format", "stride"},
    "resolvent": {"m", "indices", "inner_tol", "inner_max"},
    "gp": {"step"},
}


class ConfigError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid config:\n  - " + "\n  - ".join(self.violations))


@dataclass(frozen=True)
class OperatorConfig:
    builtin: str
    matrix: tuple | None = None
    offset: tuple | None = None
    functional: str | None = None
    center: tuple | None = None
    finite_difference: bool = False
    h: float | None = None


@dataclass(frozen=True)
class OracleConfig:
    enabled: bool = False
    tol: float = 1e-10
    region: float = 10.0


@dataclass(frozen=True)
class OutputConfig:
    trace: str = "trace.csv"
    report: str = "report.json"
    record_coords: bool = False
    format: str = "csv"
    stride: int | None = None


@dataclass(frozen=True)
class ResolventConfig:
    m: int = 6
    indices: tuple | None = None
    inner_tol: float = 1e-10
    inner_max: int = 100_000


@dataclass(frozen=True)
class ProblemConfig:
    kind: str
    space: SpaceSpec
    operator: OperatorConfig | None
    schedule: PowerSchedule = field(default_factory=PowerSchedule)
    stop: StopRule = field(default_factory=StopRule)
    family: tuple = ()
    oracle: OracleConfig = field(default_factory=OracleConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    x1: tuple | None = None
    seed: int = 0
    resolvent: ResolventConfig = field(default_factory=ResolventConfig)
    gp_step: float = 0.5

    @property
    def start(self) -> np.ndarray:
        return np.ones(self.space.n) if self.x1 is None else np.array(self.x1, float)


def _unknown(section, d, errs):
    allowed = _KEYS[section]
    where = "top level" if section is None else f"'{section}'"
    for k in sorted(set(d) - allowed):
        errs.append(f"unknown key '{k}' at {where}")


def _num(d, key, where, errs, default=None, cast=float):
    if key not in d:
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        errs.append(f"{where}.{key} must be a number, got {v!r}")
        return default
    if cast is int and int(v) != v:
        errs.append(f"{where}.{key} must be an integer, got {v!r}")
        return default
    return cast(v)


def _vec(v, n, what, errs):
    if not isinstance(v, list) or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in v):
        errs.append(f"{what} must be a list of numbers")
        return None
    if n is not None and len(v) != n:
        errs.append(f"{what} must have length {n}, got {len(v)}")
        return None
    return tuple(float(t) for t in v)


def _section(doc, name, errs):
    sec = doc.get(name, {})
    if not isinstance(sec, dict):
        errs.append(f"'{name}' must be an object")
        return {}
    _unknown(name, sec, errs)
    return sec


def parse_config(text: str, kind: str | None = None) -> ProblemConfig:
    """Parse and validate a JSON config; ``kind`` fills in a missing 'kind' key."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"malformed JSON: {exc}"]) from None
    if not isinstance(doc, dict):
        raise ConfigError(["config must be a JSON object"])
    return parse_dict(doc, kind)


def parse_dict(doc: dict, kind: str | None = None) -> ProblemConfig:
    errs: list[str] = []
    _unknown(None, doc, errs)

    k = doc.get("kind", kind)
    if kind is not None and "kind" in doc and doc["kind"] != kind:
        errs.append(f"config kind '{doc['kind']}' does not match requested '{kind}'")
    if k is None:
        errs.append("missing 'kind'")
    elif k not in KINDS:
        errs.append(f"unknown kind '{k}'; expected one of {', '.join(KINDS)}")

    # space
    space = None
    sp = _section(doc, "space", errs)
    if k != "audit" and "space" not in doc:
        errs.append("missing section 'space'")
    if sp or "space" in doc:
        n = _num(sp, "n", "space", errs, None, int)
        s = _num(sp, "s", "space", errs, 2.0)
        p = _num(sp, "p", "space", errs, 2.0)
        if n is None:
            errs.append("space.n is required")
        else:
            try:
                space = SpaceSpec(n, s, p)
            except ValueError as exc:
                errs.append(f"space: {exc}")
    dim = space.n if space else None

    # operator
    op = None
    od = _section(doc, "operator", errs)
    needs_op = k in ("zero", "minimize", "vi", "resolvent_path", "gradient_projection", "compare")
    if needs_op and "operator" not in doc:
        errs.append("missing section 'operator'")
    if "operator" in doc:
        b = od.get("builtin")
        if b not in BUILTINS:
            errs.append(f"operator.builtin must be one of {', '.join(BUILTINS)}, got {b!r}")
        matrix = offset = center = None
        if "matrix" in od:
            m = od["matrix"]
            if isinstance(m, list) and m and all(isinstance(r, list) for r in m):
                flat = [t for r in m for t in r]
                if dim is not None and (len(m) != dim or any(len(r) != dim for r in m)):
                    errs.append(f"operator.matrix must be {dim}x{dim}")
                    flat = None
            else:
                flat = m
            if flat is not None:
                vals = _vec(flat, None if dim is None else dim * dim, "operator.matrix (row-major)", errs)
                matrix = vals
        if "offset" in od and dim is not None:
            offset = _vec(od["offset"], dim, "operator.offset", errs)
        if "center" in od and dim is not None:
            center = _vec(od["center"], dim, "operator.center", errs)
        fn = od.get("functional")
        if b == "linear" and "matrix" not in od:
            errs.append("operator 'linear' requires 'matrix'")
        if b == "gradient" and fn not in FUNCTIONALS:
            errs.append(f"operator 'gradient' requires 'functional' in {', '.join(FUNCTIONALS)}")
        if b != "gradient" and fn is not None:
            errs.append("'functional' only applies to the 'gradient' builtin")
        if b == "power" and space is not None and space.p < 2:
            errs.append(f"operator 'power' needs p >= 2, got p={space.p}")
        fd = od.get("finite_difference", False)
        if not isinstance(fd, bool):
            errs.append("operator.finite_difference must be true or false")
        h = _num(od, "h", "operator", errs, None)
        if b == "linear" and matrix is not None and dim is not None:
            G = np.array(matrix).reshape(dim, dim)
            lam_min = float(np.linalg.eigvalsh(0.5 * (G + G.T))[0])
            if not lam_min > 0:
                errs.append(f"operator.matrix: symmetric part not positive definite (smallest eigenvalue {lam_min:.6g})")
        op = OperatorConfig(b, matrix, offset, fn, center, bool(fd), h)
    if k == "minimize" and (op is None or op.builtin != "gradient"):
        errs.append("minimize requires a functional: operator.builtin must be 'gradient'")

    # schedule
    sd = _section(doc, "schedule", errs)
    defaults = PowerSchedule()
    lambda0 = _num(sd, "lambda0", "schedule", errs, defaults.lambda0)
    a = _num(sd, "a", "schedule", errs, defaults.a)
    theta0 = _num(sd, "theta0", "schedule", errs, defaults.theta0)
    b_ = _num(sd, "b", "schedule", errs, defaults.b)
    schedule = defaults
    if not 0 < theta0 < 0.5:
        errs.append(f"schedule.theta0 = {theta0}: theta_1 not in (0, 1/2)")
    elif not 0 < lambda0 < 1:
        errs.append(f"schedule.lambda0 = {lambda0}: lambda_1 not in (0, 1)")
    else:
        try:
            schedule = PowerSchedule(lambda0, a, theta0, b_)
            rep = validate(schedule, horizon=1000)
            for v in rep.verdicts[:3]:
                if not v.passed:
                    errs.append(f"schedule fails condition ({v.name}): {v.detail}")
        except ValueError as exc:
            errs.append(f"schedule: {exc}")

    # stop
    st = _section(doc, "stop", errs)
    stop = StopRule()
    try:
        stop = StopRule(
            _num(st, "tol_residual", "stop", errs, 1e-6),
            _num(st, "tol_step", "stop", errs, 0.0),
            _num(st, "max_iter", "stop", errs, 10**6, int),
        )
    except ValueError as exc:
        errs.append(f"stop: {exc}")

    # family
    family = ()
    if k in ("vi", "compare") and "family" not in doc:
        errs.append("kind '%s' requires section 'family' (list of set specs)" % k)
    if "family" in doc:
        fam = doc["family"]
        if not isinstance(fam, list) or not fam:
            errs.append("'family' must be a non-empty list of set specs")
        else:
            family = tuple(_parse_set(i, d, dim, errs) for i, d in enumerate(fam))

    od2 = _section(doc, "oracle", errs)
    enabled = od2.get("enabled", False)
    if not isinstance(enabled, bool):
        errs.append("oracle.enabled must be true or false")
    region = _num(od2, "region", "oracle", errs, 10.0)
    if region is not None and not region > 0:
        errs.append("oracle.region must be > 0")
    oracle = OracleConfig(bool(enabled), _num(od2, "tol", "oracle", errs, 1e-10), region)

    ou = _section(doc, "output", errs)
    fmt_name = ou.get("format", "csv")
    if fmt_name not in ("csv", "json"):
        errs.append(f"output.format must be 'csv' or 'json', got {fmt_name!r}")
    rc = ou.get("record_coords", False)
    if not isinstance(rc, bool):
        errs.append("output.record_coords must be true or false")
    stride = _num(ou, "stride", "output", errs, None, int)
    if stride is not None and stride < 1:
        errs.append("output.stride must be >= 1")
    for key in ("trace", "report"):
        if key in ou and not isinstance(ou[key], str):
            errs.append(f"output.{key} must be a path string")
    default_trace = "trace." + (fmt_name if fmt_name in ("csv", "json") else "csv")
    output = OutputConfig(str(ou.get("trace", default_trace)), str(ou.get("report", "report.json")),
                          bool(rc), fmt_name, stride)

    x1 = None
    if "x1" in doc and dim is not None:
        x1 = _vec(doc["x1"], dim, "x1", errs)

    seed = _num(doc, "seed", "config", errs, 0, int)
    if seed is not None and seed < 0:
        errs.append("seed must be >= 0")

    rs = _section(doc, "resolvent", errs)
    m = _num(rs, "m", "resolvent", errs, 6, int)
    indices = None
    if "indices" in rs:
        iv = rs["indices"]
        if not isinstance(iv, list) or not iv or not all(isinstance(t, int) and t >= 1 for t in iv):
            errs.append("resolvent.indices must be a non-empty list of integers >= 1")
        else:
            indices = tuple(iv)
    if m is not None and m < 1:
        errs.append("resolvent.m must be >= 1")
    resolvent = ResolventConfig(m, indices, _num(rs, "inner_tol", "resolvent", errs, 1e-10),
                                _num(rs, "inner_max", "resolvent", errs, 100_000, int))

    gp = _section(doc, "gp", errs)
    gp_step = _num(gp, "step", "gp", errs, 0.5)
    if gp_step is not None and not gp_step > 0:
        errs.append("gp.step must be > 0")
    if k in ("gradient_projection", "compare") and space is not None and not space.is_hilbert:
        errs.append(f"kind '{k}' needs a Hilbert space (s = p = 2)")

    if errs:
        raise ConfigError(errs)
    return ProblemConfig(k, space, op, schedule, stop, family, oracle, output, x1, seed, resolvent, gp_step)


def _parse_set(i, d, dim, errs):
    where = f"family[{i}]"
    if not isinstance(d, dict):
        errs.append(f"{where} must be an object")
        return None
    kind = d.get("kind")
    if kind not in SET_KINDS:
        errs.append(f"{where}.kind must be one of {', '.join(SET_KINDS)}, got {kind!r}")
        return None
    allowed = {"kind", *SET_KINDS[kind]}
    for key in sorted(set(d) - allowed):
        errs.append(f"unknown key '{key}' in {where}")
    out = {"kind": kind}
    for key in SET_KINDS[kind]:
        if key not in d:
            errs.append(f"{where} ({kind}) requires '{key}'")
            continue
        if key in ("radius", "offset"):
            v = _num(d, key, where, errs)
            if key == "radius" and v is not None and not v > 0:
                errs.append(f"{where}.radius must be > 0")
            out[key] = v
        elif dim is not None:
            out[key] = _vec(d[key], dim, f"{where}.{key}", errs)
    if kind == "box" and out.get("lo") and out.get("hi") and any(l > h for l, h in zip(out["lo"], out["hi"])):
        errs.append(f"{where}: box needs lo <= hi")
    if kind == "halfspace" and out.get("normal") and not any(out["normal"]):
        errs.append(f"{where}: halfspace normal must be nonzero")
    return out


def config_to_dict(cfg: ProblemConfig) -> dict:
    """Normalized document with every default spelled out."""
    doc = {
        "kind": cfg.kind,
        "schedule": cfg.schedule.to_dict(),
        "stop": {"tol_residual": cfg.stop.tol_residual, "tol_step": cfg.stop.tol_step,
                 "max_iter": cfg.stop.max_iter},
        "oracle": {"enabled": cfg.oracle.enabled, "tol": cfg.oracle.tol, "region": cfg.oracle.region},
        "output": {"trace": cfg.output.trace, "report": cfg.output.report,
                   "record_coords": cfg.output.record_coords, "format": cfg.output.format},
        "seed": cfg.seed,
        "resolvent": {"m": cfg.resolvent.m, "inner_tol": cfg.resolvent.inner_tol,
                      "inner_max": cfg.resolvent.inner_max},
        "gp": {"step": cfg.gp_step},
    }
    if cfg.output.stride is not None:
        doc["output"]["stride"] = cfg.output.stride
    if cfg.resolvent.indices is not None:
        doc["resolvent"]["indices"] = list(cfg.resolvent.indices)
    if cfg.space is not None:
        doc["space"] = {"n": cfg.space.n, "s": cfg.space.s, "p": cfg.space.p}
    if cfg.operator is not None:
        o = cfg.operator
        od = {"builtin": o.builtin, "finite_difference": o.finite_difference}
        if o.matrix is not None:
            od["matrix"] = list(o.matrix)
        for key in ("offset", "center"):
            if getattr(o, key) is not None:
                od[key] = list(getattr(o, key))
        if o.functional is not None:
            od["functional"] = o.functional
        if o.h is not None:
            od["h"] = o.h
        doc["operator"] = od
    if cfg.family:
        doc["family"] = [{k: (list(v) if isinstance(v, tuple) else v) for k, v in s.items()} for s in cfg.family]
    if cfg.x1 is not None:
        doc["x1"] = list(cfg.x1)
    return doc


def config_to_json(cfg: ProblemConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n"


def with_overrides(cfg: ProblemConfig, *, seed=None, fmt=None, max_iter=None, tol=None) -> ProblemConfig:
    """Apply command-line flag overrides."""
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    if fmt is not None:
        trace = cfg.output.trace
        if trace.endswith((".csv", ".json")):
            trace = trace.rsplit(".", 1)[0] + "." + fmt
        cfg = replace(cfg, output=replace(cfg.output, format=fmt, trace=trace))
    if max_iter is not None or tol is not None:
        cfg = replace(cfg, stop=StopRule(
            cfg.stop.tol_residual if tol is None else tol,
            cfg.stop.tol_step,
            cfg.stop.max_iter if max_iter is None else max_iter,
        ))
    return cfg
