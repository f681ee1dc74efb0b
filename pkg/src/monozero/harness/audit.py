"""Property audit: every check reports its own pass/fail line."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import (
    lemma4_residual,
    lemma5_residual,
    lemma6_residual,
    phi_bounds_check,
    phi_p,
)
from ..lp_space import SpaceSpec, dual_norm, duality_map, inverse_duality_map, norm, pair
from ..operators import certify_strong_monotonicity, example16_operator, power_map
from ..schedules import PowerSchedule, validate


@dataclass(frozen=True)
class AuditLine:
    name: str
    passed: bool
    detail: str

    def __str__(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def random_points(rng, count, n):
    """Gaussian directions with log-normal magnitudes, spanning several decades."""
    return rng.standard_normal((count, n)) * np.exp(rng.normal(0.0, 1.5, size=(count, 1)))


def duality_identities(seed=0, dims=(1, 2, 5, 50), exps=(1.5, 2.0, 3.0, 4.0), count=1000):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in dims:
        for p in exps:
            sp = SpaceSpec(n, p, p)
            x = random_points(rng, count, n)
            f = duality_map(sp, x)
            nx = norm(sp, x)
            e1 = np.abs(pair(f, x) - nx**p) / (1 + nx**p)
            e2 = np.abs(dual_norm(sp, f) - nx ** (p - 1)) / (1 + nx ** (p - 1))
            worst = max(worst, e1.max(), e2.max())
    return AuditLine("duality map identities", worst <= 1e-9, f"worst scaled error {worst:.2e} (tol 1e-9)")


def inverse_roundtrip(seed=0, dims=(1, 2, 5, 50), exps=(1.5, 2.0, 3.0, 4.0), count=1000):
    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    for n in dims:
        for p in exps:
            sp = SpaceSpec(n, p, p)
            x = random_points(rng, count, n)
            back = inverse_duality_map(sp, duality_map(sp, x))
            scale = np.max(np.abs(x), axis=1, keepdims=True)
            worst = max(worst, float(np.max(np.abs(back - x) / scale)))
            f = random_points(rng, count, n)
            fwd = duality_map(sp, inverse_duality_map(sp, f))
            scale = np.max(np.abs(f), axis=1, keepdims=True)
            worst = max(worst, float(np.max(np.abs(fwd - f) / scale)))
    return AuditLine("inverse duality roundtrip", worst <= 1e-9, f"worst relative error {worst:.2e} (tol 1e-9)")


def phi_positivity(seed=0, dims=(1, 2, 5), exps=(1.5, 2.0, 3.0, 4.0), count=10_000):
    rng = np.random.default_rng(seed + 2)
    worst = 0.0
    for n in dims:
        for p in exps:
            sp = SpaceSpec(n, p, p)
            x, y = random_points(rng, count, n), random_points(rng, count, n)
            val = phi_p(sp, x, y)
            scale = 1 + norm(sp, x) ** p + norm(sp, y) ** p
            worst = min(worst, float(np.min(val / scale)))
            diag = np.abs(phi_p(sp, x, x)) / (1 + norm(sp, x) ** p)
            worst = min(worst, -float(np.max(diag)))
    return AuditLine("phi_p >= 0 and phi_p(x, x) = 0", worst >= -1e-10, f"worst scaled value {worst:.2e}")


def lemma_sweep(which, seed=0, dims=(1, 2, 5), exps=(2.0, 3.0), count=10_000):
    rng = np.random.default_rng(seed + {"4": 10, "5": 11, "6": 12}[which])
    worst = np.inf
    for n in dims:
        for p in exps:
            sp = SpaceSpec(n, p, p)
            a, b, c = (random_points(rng, count, n) for _ in range(3))
            if which == "4":
                res, scale = lemma4_residual(sp, a, b, c, with_scale=True)
            elif which == "5":
                res, scale = lemma5_residual(sp, a, b, with_scale=True)
            else:
                res, scale = lemma6_residual(sp, a, b, c, with_scale=True)
            worst = min(worst, float(np.min(res / scale)))
    return AuditLine(f"lemma {which} residual sweep", worst >= -1e-9,
                     f"min scaled residual {worst:.2e} over {count} samples x {len(dims) * len(exps)} cells")


def phi_sandwich(seed=0, dims=(1, 2, 5), exps=(2.0, 3.0, 4.0), count=10_000):
    """Lower and upper bound reported on separate lines."""
    rng = np.random.default_rng(seed + 3)
    lines = []
    for p in exps:
        lo_bad = hi_bad = 0
        for n in dims:
            sp = SpaceSpec(n, p, p)
            x, y = random_points(rng, count, n), random_points(rng, count, n)
            lo, hi = phi_bounds_check(sp, x, y)
            lo_bad += int(np.sum(~lo))
            hi_bad += int(np.sum(~hi))
        total = count * len(dims)
        lines.append(AuditLine(f"phi_p lower bound |‖x‖-‖y‖|^p (p={p:g})", lo_bad == 0,
                               f"{lo_bad}/{total} violations"))
        detail = f"{hi_bad}/{total} violations"
        if p > 2:
            sp1 = SpaceSpec(1, p, p)
            detail += f"; x=0, y=1 gives phi_p={phi_p(sp1, [0.0], [1.0]):g} > 1"
        lines.append(AuditLine(f"phi_p upper bound (‖x‖+‖y‖)^p (p={p:g})", hi_bad == 0, detail))
    return lines


def certificates(seed=0, samples=10_000):
    out = []
    c = certify_strong_monotonicity(example16_operator(), 2.0, samples, 10.0, seed)
    out.append(AuditLine("linear example certificate eta >= 8", c.eta_hat >= 8 - 1e-6, f"eta_hat = {c.eta_hat:.9f}"))
    for p in (2.0, 3.0, 4.0):
        T = power_map(SpaceSpec(3, 2.0, p))
        c = certify_strong_monotonicity(T, p, samples, 5.0, seed)
        bound = 2.0 ** (2 - p)
        out.append(AuditLine(f"power map certificate eta >= 2^(2-p) (p={p:g})", c.eta_hat >= bound - 1e-6,
                             f"eta_hat = {c.eta_hat:.6f}, bound {bound:g}"))
    return out


def schedule_checks():
    out = []
    rep = validate(PowerSchedule(), 10**6)
    out.append(AuditLine("default schedule admissible (i), (ii), (iii-limit)", rep.admissible,
                         "; ".join(f"({v.name}) {'ok' if v.passed else 'fails'}" for v in rep.verdicts[:3])))
    out.append(AuditLine("summability clause flagged unsatisfiable", not rep["iii-summability"].passed
                         and len(rep.inequality_chain) > 0, rep["iii-summability"].detail))
    bad = validate(PowerSchedule(0.9, 0.8, 0.49, 0.4), 10**4)
    out.append(AuditLine("a=0.8, b=0.4 rejected by (ii)", not bad["ii"].passed, bad["ii"].detail))
    return out


def run_audit(seed: int = 0) -> list[AuditLine]:
    lines = [duality_identities(seed), inverse_roundtrip(seed), phi_positivity(seed)]
    lines += phi_sandwich(seed)
    lines += [lemma_sweep("4", seed), lemma_sweep("5", seed, exps=(1.5, 2.0, 3.0, 4.0)), lemma_sweep("6", seed)]
    lines += certificates(seed)
    lines += schedule_checks()
    return lines
