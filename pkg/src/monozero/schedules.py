"""Step-size and regularization sequences lambda_n, theta_n and their validation.

Admissibility conditions checked by :func:`validate`:

(i)     theta_n in (0, 1/2), strictly decreasing, theta_n -> 0
(ii)    sum lambda_n theta_n = inf
(iii)   ((theta_{n-1}/theta_n) - 1) / (lambda_n theta_n) -> 0

An extra requirement sum lambda_n < inf, sometimes paired with (iii),
contradicts (ii) whenever theta_n < 1/2; it is reported as unsatisfiable
and never enforced.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class PowerSchedule:
    """lambda_n = lambda0 * n^-a and theta_n = theta0 * n^-b, n >= 1."""

    lambda0: float = 0.9
    a: float = 0.5
    theta0: float = 0.49
    b: float = 0.25

    def __post_init__(self):
        errors = []
        if not 0.0 < self.lambda0 < 1.0:
            errors.append(f"lambda0 must lie in (0, 1), got {self.lambda0}")
        if not self.a >= 0.0:
            errors.append(f"a must be >= 0, got {self.a}")
        if not 0.0 < self.theta0 < 0.5:
            errors.append(f"theta0 must lie in (0, 1/2), got {self.theta0}")
        if not self.b > 0.0:
            errors.append(f"b must be > 0 so that theta_n strictly decreases to 0, got {self.b}")
        if errors:
            raise ValueError("; ".join(errors))

    def lam(self, n):
        return _power(self.lambda0, n, self.a)

    def theta(self, n):
        return _power(self.theta0, n, self.b)

    def to_dict(self) -> dict:
        return {"lambda0": self.lambda0, "a": self.a, "theta0": self.theta0, "b": self.b}


@dataclass(frozen=True)
class CallableSchedule:
    """User-supplied sequences; only checked numerically by :func:`validate`.

    Solvers do not validate these, which also makes theta_n = 0 usable
    as a debugging mode.
    """

    lam_fn: Callable[[int], float]
    theta_fn: Callable[[int], float]
    label: str = "callable"

    def lam(self, n):
        _check_index(n)
        return float(self.lam_fn(n))

    def theta(self, n):
        _check_index(n)
        return float(self.theta_fn(n))


def _power(c, n, e):
    _check_index(n)
    if np.ndim(n):
        return c * np.asarray(n, float) ** -e
    return c * float(n) ** -e


def _check_index(n):
    if np.min(n) < 1:
        raise ValueError(f"sequence index must be >= 1, got {n}")


def lam(schedule, n):
    return schedule.lam(n)


def theta(schedule, n):
    return schedule.theta(n)


def condition_iii_ratio(schedule, n):
    """((theta_{n-1}/theta_n) - 1) / (lambda_n theta_n) for n >= 2."""
    if n < 2:
        raise ValueError("ratio needs n >= 2")
    if isinstance(schedule, PowerSchedule):
        # (n/(n-1))^b - 1 computed without cancellation
        num = math.expm1(-schedule.b * math.log1p(-1.0 / n))
    else:
        num = schedule.theta(n - 1) / schedule.theta(n) - 1.0
    return num / (schedule.lam(n) * schedule.theta(n))


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    horizon: int
    formula: str
    detail: str = ""
    evidence: tuple = ()


@dataclass(frozen=True)
class ScheduleReport:
    verdicts: tuple[Verdict, ...]
    partial_sums: tuple[tuple[int, float], ...] = ()
    ratio_samples: tuple[tuple[int, float], ...] = ()
    inequality_chain: tuple[str, ...] = field(default=())

    def __getitem__(self, name: str) -> Verdict:
        for v in self.verdicts:
            if v.name == name:
                return v
        raise KeyError(name)

    @property
    def admissible(self) -> bool:
        """Conditions (i), (ii) and the limit part of (iii) all pass."""
        return all(self[k].passed for k in ("i", "ii", "iii-limit"))

    def lines(self) -> list[str]:
        out = []
        for v in self.verdicts:
            mark = "PASS" if v.passed else "FAIL"
            out.append(f"[{mark}] ({v.name}) {v.formula} -- {v.detail} [horizon {v.horizon}]")
        out.extend("    " + step for step in self.inequality_chain)
        return out


INEQUALITY_CHAIN = (
    "theta_n < 1/2 for every n",
    "=> lambda_n * theta_n < lambda_n / 2",
    "=> sum lambda_n theta_n <= (1/2) sum lambda_n",
    "=> sum lambda_n < inf forces sum lambda_n theta_n < inf, contradicting (ii)",
    "=> (ii) and 'sum lambda_n < inf' cannot hold together; the summability clause is dropped",
)


def _log_points(horizon: int) -> list[int]:
    pts, k = [], 1
    while 10**k <= horizon:
        pts.append(10**k)
        k += 1
    if not pts or pts[-1] != horizon:
        pts.append(horizon)
    return pts


def validate(schedule, horizon: int = 10**6) -> ScheduleReport:
    """Check conditions (i), (ii), (iii-limit) and flag the summability conflict.

    Power schedules are judged by their exponents; other schedules by
    numeric evidence up to ``horizon``, which is suggestive, not a proof.
    """
    if horizon < 10:
        raise ValueError("horizon must be >= 10")
    pts = _log_points(horizon)
    power = isinstance(schedule, PowerSchedule)

    sums = []
    if power:
        ns = np.arange(1, horizon + 1, dtype=float)
        cum = np.cumsum(schedule.lambda0 * schedule.theta0 * ns ** -(schedule.a + schedule.b))
        sums = [(n, float(cum[n - 1])) for n in pts]
    else:
        acc, nxt = 0.0, iter(pts)
        target = next(nxt)
        for n in range(1, horizon + 1):
            acc += schedule.lam(n) * schedule.theta(n)
            if n == target:
                sums.append((n, acc))
                target = next(nxt, None)
    ratios = [(n, condition_iii_ratio(schedule, n)) for n in pts]

    if power:
        a, b = schedule.a, schedule.b
        v1 = Verdict("i", True, horizon, "theta_n = theta0 n^-b in (0,1/2), decreasing to 0",
                     f"analytic: b = {b:g} > 0 and theta0 = {schedule.theta0:g} < 1/2")
        v2 = Verdict("ii", a + b <= 1.0, horizon, "sum lambda_n theta_n = inf",
                     f"analytic: terms ~ n^-{a + b:g}, diverges iff a + b <= 1", tuple(sums))
        v3 = Verdict("iii-limit", a + b < 1.0, horizon,
                     "((theta_{n-1}/theta_n) - 1)/(lambda_n theta_n) -> 0",
                     f"analytic: ratio ~ (b/(lambda0 theta0)) n^{a + b - 1:g}, vanishes iff a + b < 1",
                     tuple(ratios))
    else:
        thetas = [schedule.theta(n) for n in range(1, min(horizon, 10_000) + 1)]
        if horizon > 10_000:
            thetas.append(schedule.theta(horizon))
        ok_range = all(0.0 < t < 0.5 for t in thetas)
        ok_dec = all(t1 < t0 for t0, t1 in zip(thetas, thetas[1:]))
        ok_small = thetas[-1] < 0.5 * thetas[0]
        v1 = Verdict("i", ok_range and ok_dec and ok_small, horizon,
                     "theta_n in (0,1/2), decreasing to 0",
                     f"numeric: in range={ok_range}, decreasing={ok_dec}, theta_H < theta_1/2={ok_small}")
        # local decay exponent of the terms between horizon/10 and horizon
        lo = max(1, horizon // 10)
        t_lo = schedule.lam(lo) * schedule.theta(lo)
        t_hi = schedule.lam(horizon) * schedule.theta(horizon)
        k = math.log(t_lo / t_hi) / math.log(horizon / lo) if t_hi > 0 and t_lo > 0 else math.inf
        v2 = Verdict("ii", k <= 1.0 + 1e-9, horizon, "sum lambda_n theta_n = inf",
                     f"numeric: tail terms decay like n^-{k:.4g}", tuple(sums))
        vals = [r for _, r in ratios]
        ok3 = all(r1 <= r0 for r0, r1 in zip(vals, vals[1:])) and vals[-1] < vals[0]
        v3 = Verdict("iii-limit", ok3, horizon,
                     "((theta_{n-1}/theta_n) - 1)/(lambda_n theta_n) -> 0",
                     "numeric: tabulated ratio decreasing", tuple(ratios))
    v4 = Verdict("iii-summability", False, horizon, "sum lambda_n < inf",
                 "jointly unsatisfiable with (ii) when theta_n < 1/2; not enforced")
    return ScheduleReport((v1, v2, v3, v4), tuple(sums), tuple(ratios), INEQUALITY_CHAIN)


def require_admissible(schedule, horizon: int = 1000) -> None:
    """Raise ValueError unless (i), (ii) and (iii-limit) pass."""
    report = validate(schedule, horizon)
    if not report.admissible:
        failed = [v for v in report.verdicts[:3] if not v.passed]
        raise ValueError("schedule is not admissible: " + "; ".join(f"({v.name}) {v.detail}" for v in failed))
