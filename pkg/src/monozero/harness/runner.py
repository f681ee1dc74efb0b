"""Execute a validated :class:`ProblemConfig` and write its outputs.

Exit codes: 0 ok, 2 config invalid, 3 solver hit max_iter (or the resolvent
its inner limit), 4 diverged, 5 oracle failure, 6 audit failure.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from ..lp_space import norm
from ..solver import (
    ResolventFailure,
    Status,
    gradient_projection,
    minimize,
    regularization_path,
    solve_vi,
    solve_zero,
)
from .audit import run_audit
from .config import ProblemConfig, config_to_dict
from .oracles import OracleFailure, oracle_vi, oracle_zero
from .problems import build_family, build_functional, build_operator, build_sets
from .traces import emit_trace, fmt, write_json

EXIT_OK, EXIT_CONFIG, EXIT_MAX_ITER, EXIT_DIVERGED, EXIT_ORACLE, EXIT_AUDIT = 0, 2, 3, 4, 5, 6
ORACLE_GAP_TOL = 1e-4
COMPARE_TOL = 1e-3

_STATUS_EXIT = {
    Status.CONVERGED_RESIDUAL: EXIT_OK,
    Status.CONVERGED_STEP: EXIT_OK,
    Status.MAX_ITER_REACHED: EXIT_MAX_ITER,
    Status.DIVERGED_NONFINITE: EXIT_DIVERGED,
}


def _summary(rows, out):
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"  {k.ljust(width)}  {v}", file=out)


def _oracle(cfg, T):
    if cfg.kind == "vi":
        return oracle_vi(T, build_sets(cfg), tol=max(cfg.oracle.tol, 1e-12))
    return oracle_zero(T, region=cfg.oracle.region, tol=cfg.oracle.tol, seed=cfg.seed)


def run(cfg: ProblemConfig, out_dir=".", out=None) -> int:
    import sys

    out = out or sys.stdout
    out_dir = Path(out_dir)
    if cfg.kind == "audit":
        lines = run_audit(cfg.seed)
        for line in lines:
            print(line, file=out)
        ok = all(line.passed for line in lines)
        write_json({"kind": "audit", "seed": cfg.seed,
                    "lines": [{"name": l.name, "passed": l.passed, "detail": l.detail} for l in lines],
                    "passed": ok}, out_dir / cfg.output.report)
        print(f"audit: {sum(l.passed for l in lines)}/{len(lines)} checks passed", file=out)
        return EXIT_OK if ok else EXIT_AUDIT
    if cfg.kind == "resolvent_path":
        return _run_path(cfg, out_dir, out)
    if cfg.kind == "compare":
        return _run_compare(cfg, out_dir, out)

    space = cfg.space
    T = build_operator(cfg)
    x_ref = None
    oracle_info = None
    if cfg.oracle.enabled:
        try:
            sol = _oracle(cfg, T)
        except OracleFailure as exc:
            print(f"oracle failure: {exc}", file=out)
            return EXIT_ORACLE
        x_ref = sol.point
        oracle_info = {"point": sol.point, "method": sol.method, "residual": sol.residual,
                       "tolerance": sol.tolerance}

    kw = dict(x_ref=x_ref, stride=cfg.output.stride, record_coords=cfg.output.record_coords)
    if cfg.kind == "zero":
        report, trace = solve_zero(space, T, cfg.start, cfg.schedule, cfg.stop, **kw)
    elif cfg.kind == "minimize":
        f, grad = build_functional(cfg)
        report, trace = minimize(space, f, None if cfg.operator.finite_difference else grad,
                                 cfg.start, cfg.schedule, cfg.stop, h=cfg.operator.h, **kw)
    elif cfg.kind == "vi":
        report, trace = solve_vi(space, T, build_family(cfg), cfg.start, cfg.schedule, cfg.stop, **kw)
    else:
        report, trace = gradient_projection(space, T, build_sets(cfg), cfg.start, cfg.gp_step, cfg.stop, **kw)

    emit_trace(trace, cfg.output.format, out_dir / cfg.output.trace)
    doc = {
        "kind": cfg.kind,
        "status": report.status.value,
        "iterations": report.iterations,
        "final_point": report.x,
        "final_residual": report.residual,
        "extras": report.extras,
        "config": config_to_dict(cfg),
    }
    rows = [("kind", cfg.kind), ("status", report.status.value), ("iterations", report.iterations),
            ("final residual", f"{report.residual:.3e}"),
            ("final point", np.array2string(report.x, precision=6))]
    if oracle_info is not None:
        gap = float(norm(space, report.x - x_ref))
        doc["oracle"] = dict(oracle_info, gap=gap)
        rel = "≤" if gap <= ORACLE_GAP_TOL else ">"
        rows.append(("oracle", f"{oracle_info['method']} at {np.array2string(x_ref, precision=6)}"))
        rows.append(("oracle gap", f"{gap:.3e} ({rel} {ORACLE_GAP_TOL:.0e})"))
    write_json(doc, out_dir / cfg.output.report)
    print(f"monozero {cfg.kind}", file=out)
    _summary(rows, out)
    return _STATUS_EXIT[report.status]


def _run_path(cfg, out_dir, out):
    T = build_operator(cfg)
    r = cfg.resolvent
    try:
        path = regularization_path(cfg.space, T, cfg.start, cfg.schedule, m=r.m, inner_tol=r.inner_tol,
                                   indices=r.indices, inner_max=r.inner_max)
    except ResolventFailure as exc:
        print(f"resolvent failure at n={exc.index}: {exc}", file=out)
        return EXIT_MAX_ITER
    n = cfg.space.n
    cols = ["n", "theta", "norm_y", "eq38_residual", "resolvent_residual", "inner_iterations",
            "eq50_lhs", "eq50_rhs"] + [f"y_{i}" for i in range(1, n + 1)]
    target = out_dir / cfg.output.trace
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for pt in path:
            w.writerow([pt.n, fmt(pt.theta), fmt(norm(cfg.space, pt.y)), fmt(pt.eq38_residual),
                        fmt(pt.resolvent_residual), pt.inner_iterations,
                        "" if pt.eq50_lhs is None else fmt(pt.eq50_lhs),
                        "" if pt.eq50_rhs is None else fmt(pt.eq50_rhs)] + [fmt(v) for v in pt.y])
    write_json({"kind": cfg.kind, "points": [
        {"n": pt.n, "theta": pt.theta, "y": pt.y, "eq38_residual": pt.eq38_residual,
         "resolvent_residual": pt.resolvent_residual, "eq50_lhs": pt.eq50_lhs, "eq50_rhs": pt.eq50_rhs}
        for pt in path], "config": config_to_dict(cfg)}, out_dir / cfg.output.report)
    print(f"monozero resolvent_path ({len(path)} points)", file=out)
    print(f"  {'n':>8} {'theta':>12} {'||y_n||':>12} {'eq38 res':>10} {'eq50 lhs':>10} {'eq50 rhs':>10}", file=out)
    for pt in path:
        lhs = "" if pt.eq50_lhs is None else f"{pt.eq50_lhs:.3e}"
        rhs = "" if pt.eq50_rhs is None else f"{pt.eq50_rhs:.3e}"
        print(f"  {pt.n:>8} {pt.theta:>12.6g} {norm(cfg.space, pt.y):>12.6g} {pt.eq38_residual:>10.2e} "
              f"{lhs:>10} {rhs:>10}", file=out)
    return EXIT_OK


def iterations_to_tolerance(trace, target, tol):
    """First recorded n with ||x_n - target|| <= tol, or None."""
    for n, x in zip(trace.n, trace.coords):
        if math.sqrt(float(np.sum((x - target) ** 2))) <= tol:
            return n
    return None


def _run_compare(cfg, out_dir, out):
    T = build_operator(cfg)
    sets = build_sets(cfg)
    try:
        sol = oracle_vi(T, sets, tol=max(cfg.oracle.tol, 1e-12))
    except OracleFailure as exc:
        print(f"oracle failure: {exc}", file=out)
        return EXIT_ORACLE
    kw = dict(x_ref=sol.point, stride=1, record_coords=True)
    vi_rep, vi_tr = solve_vi(cfg.space, T, build_family(cfg), cfg.start, cfg.schedule, cfg.stop, **kw)
    gp_rep, gp_tr = gradient_projection(cfg.space, T, sets, cfg.start, cfg.gp_step, cfg.stop, **kw)
    rows = []
    for name, rep, tr in (("vi", vi_rep, vi_tr), ("gradient_projection", gp_rep, gp_tr)):
        gap = float(np.linalg.norm(rep.x - sol.point))
        rows.append({"solver": name, "status": rep.status.value, "iterations": rep.iterations,
                     "iterations_to_tol": iterations_to_tolerance(tr, sol.point, COMPARE_TOL),
                     "final_gap": gap})
    stem = Path(cfg.output.trace).stem
    emit_trace(vi_tr, cfg.output.format, out_dir / f"{stem}_vi.{cfg.output.format}")
    emit_trace(gp_tr, cfg.output.format, out_dir / f"{stem}_gp.{cfg.output.format}")
    table = out_dir / "compare.csv"
    table.parent.mkdir(parents=True, exist_ok=True)
    with open(table, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["solver", "status", "iterations", "iterations_to_tol", "final_gap"])
        for r in rows:
            w.writerow([r["solver"], r["status"], r["iterations"],
                        "" if r["iterations_to_tol"] is None else r["iterations_to_tol"], fmt(r["final_gap"])])
    write_json({"kind": "compare", "oracle": {"point": sol.point, "residual": sol.residual},
                "tolerance": COMPARE_TOL, "rows": rows, "config": config_to_dict(cfg)},
               out_dir / cfg.output.report)
    print(f"monozero compare (oracle {np.array2string(sol.point, precision=6)}, tol {COMPARE_TOL:g})", file=out)
    print(f"  {'solver':<20} {'status':<20} {'iters':>8} {'iters to tol':>13} {'final gap':>11}", file=out)
    for r in rows:
        itt = "-" if r["iterations_to_tol"] is None else str(r["iterations_to_tol"])
        print(f"  {r['solver']:<20} {r['status']:<20} {r['iterations']:>8} {itt:>13} {r['final_gap']:>11.3e}",
              file=out)
    reached = all(r["final_gap"] <= COMPARE_TOL for r in rows)
    return EXIT_OK if reached else EXIT_MAX_ITER
