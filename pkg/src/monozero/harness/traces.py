"""Trace and report files.

CSV columns are n, lambda, theta, residual_dual, step_norm, phi_to_ref and,
when coordinates were recorded, x_1..x_n. JSON traces hold the same fields
as an array of row objects (phi_to_ref omitted when absent). Floats are
written with 17 significant digits so they read back bit-exactly.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from ..solver import IterationTrace

BASE_COLUMNS = ("n", "lambda", "theta", "residual_dual", "step_norm", "phi_to_ref")


def fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    if not math.isfinite(v):
        raise ValueError(f"cannot serialize non-finite value {v}")
    return format(v, ".17g")


def trace_columns(trace: IterationTrace) -> list[str]:
    cols = list(BASE_COLUMNS)
    if trace.coords is not None and trace.coords:
        cols += [f"x_{i}" for i in range(1, len(trace.coords[0]) + 1)]
    return cols


def _records(trace):
    for row in trace.rows():
        rec = {
            "n": fmt(row["n"]),
            "lambda": fmt(row["lambda"]),
            "theta": fmt(row["theta"]),
            "residual_dual": fmt(row["residual_dual"]),
            "step_norm": fmt(row["step_norm"]),
            "phi_to_ref": None if row["phi_to_ref"] is None else fmt(row["phi_to_ref"]),
        }
        if row["x"] is not None:
            rec.update({f"x_{i}": fmt(v) for i, v in enumerate(row["x"], start=1)})
        yield rec


def trace_to_csv(trace: IterationTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = trace_columns(trace)
    w.writerow(cols)
    for rec in _records(trace):
        w.writerow(["" if rec.get(c) is None else rec[c] for c in cols])
    return buf.getvalue()


def trace_to_json(trace: IterationTrace) -> str:
    lines = []
    for rec in _records(trace):
        body = ", ".join(f'"{k}": {v}' for k, v in rec.items() if v is not None)
        lines.append("  {" + body + "}")
    return "[\n" + ",\n".join(lines) + ("\n" if lines else "") + "]\n"


def emit_trace(trace: IterationTrace, fmt_name: str, path) -> Path:
    if fmt_name not in ("csv", "json"):
        raise ValueError(f"unknown trace format {fmt_name!r}")
    text = trace_to_csv(trace) if fmt_name == "csv" else trace_to_json(trace)
    return _write(path, text)


def read_trace_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return [
            {k: (None if v == "" else (int(v) if k == "n" else float(v))) for k, v in row.items()}
            for row in csv.DictReader(fh)
        ]


def write_json(obj, path) -> Path:
    return _write(path, json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n")


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else str(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def _write(path, text) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path
