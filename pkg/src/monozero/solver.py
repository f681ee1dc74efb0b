"""Iteration kernels for zeros of strongly monotone operators.

All kernels share one driver: at step n they evaluate T at the current
iterate, record a trace row, test the stop rule, then apply a
kernel-specific update.

* :func:`solve_zero`            x+ = J^-1(J x - l(Tx + t(J x - J x1)))
* :func:`solve_zero_hilbert`    x+ = x - l Tx - l t (x - x1)
* :func:`minimize`              solve_zero on the gradient of a functional
* :func:`solve_vi`              the same with a cyclic family applied first
* :func:`gradient_projection`   x+ = P_K(x - eta_n Tx), for comparison
* :func:`resolvent`, :func:`regularization_path`

Here l = lambda_n, t = theta_n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .lp_space import SpaceSpec, _as_vector, _jmap, lr_norm
from .operators import MonotoneOperator, NonFiniteError, gradient_of
from .projections import CyclicFamily, ConvexSetSpec, check_quasi_phi_nonexpansive, project_intersection
from .schedules import PowerSchedule, require_admissible


class Status(str, Enum):
    CONVERGED_RESIDUAL = "converged_residual"
    CONVERGED_STEP = "converged_step"
    MAX_ITER_REACHED = "max_iter_reached"
    DIVERGED_NONFINITE = "diverged_nonfinite"


@dataclass(frozen=True)
class StopRule:
    tol_residual: float = 1e-6
    tol_step: float = 0.0
    max_iter: int = 10**6

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.tol_residual < 0 or self.tol_step < 0:
            raise ValueError("tolerances must be nonnegative")
        if not (self.tol_residual > 0 or self.tol_step > 0):
            raise ValueError("at least one tolerance must be positive")


@dataclass
class IterationTrace:
    """Recorded rows of a run; ``phi_to_ref`` and ``coords`` are optional columns."""

    n: list[int] = field(default_factory=list)
    lam: list[float] = field(default_factory=list)
    theta: list[float] = field(default_factory=list)
    residual: list[float] = field(default_factory=list)
    step: list[float] = field(default_factory=list)
    phi_to_ref: list[float] | None = None
    coords: list[np.ndarray] | None = None
    feasibility: list[float] | None = None

    def __len__(self):
        return len(self.n)

    def rows(self):
        for i in range(len(self.n)):
            yield {
                "n": self.n[i],
                "lambda": self.lam[i],
                "theta": self.theta[i],
                "residual_dual": self.residual[i],
                "step_norm": self.step[i],
                "phi_to_ref": None if self.phi_to_ref is None else self.phi_to_ref[i],
                "x": None if self.coords is None else self.coords[i],
            }


@dataclass(frozen=True)
class SolveReport:
    status: Status
    x: np.ndarray
    residual: float
    iterations: int
    extras: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.status in (Status.CONVERGED_RESIDUAL, Status.CONVERGED_STEP)


class _Maps:
    """Norms and duality maps specialised for the space, for the inner loops."""

    def __init__(self, space: SpaceSpec):
        self.space = space
        s, p, sd, q = space.s, space.p, space.s_dual, space.q
        if s == 2.0:
            self.norm = _euclid
        else:
            self.norm = lambda v: float(lr_norm(v, s))
        if sd == 2.0:
            self.dual_norm = _euclid
        else:
            self.dual_norm = lambda v: float(lr_norm(v, sd))
        if s == 2.0 and p == 2.0:
            self.J = self.Jinv = _identity
        else:
            self.J = lambda v: _jmap(v, s, p)
            self.Jinv = lambda v: _jmap(v, sd, q)

    def phi(self, x, y):
        """phi_p(x, y) with the Bregman-consistent normalisation."""
        p = self.space.p
        return self.norm(x) ** p - p * float(np.dot(self.J(y), x)) + (p - 1.0) * self.norm(y) ** p


def _euclid(v):
    return math.sqrt(float(np.dot(v, v)))


def _identity(v):
    return v


def _schedule_values(schedule, max_iter, chunk=65_536):
    """Yield (lambda_n, theta_n) for n = 1..max_iter."""
    if isinstance(schedule, PowerSchedule):
        for start in range(1, max_iter + 1, chunk):
            ns = np.arange(start, min(start + chunk, max_iter + 1), dtype=float)
            yield from zip(schedule.lam(ns).tolist(), schedule.theta(ns).tolist())
    else:
        for n in range(1, max_iter + 1):
            yield schedule.lam(n), schedule.theta(n)


def _should_record(n, stride):
    if stride is None:
        return n <= 10_000 or n % 10 == 0
    return (n - 1) % stride == 0


class _Recorder:
    def __init__(self, maps, x_ref, stride, record_coords, feasibility=None):
        self.maps = maps
        self.x_ref = None if x_ref is None else np.asarray(x_ref, float)
        self.stride = stride
        self.feasibility = feasibility
        self.trace = IterationTrace(
            phi_to_ref=None if x_ref is None else [],
            coords=[] if record_coords else None,
            feasibility=None if feasibility is None else [],
        )
        self.last = 0

    def add(self, n, lam, theta, res, step, x, force=False):
        if n == self.last or not (force or _should_record(n, self.stride)):
            return
        t = self.trace
        t.n.append(n)
        t.lam.append(lam)
        t.theta.append(theta)
        t.residual.append(res)
        t.step.append(step)
        if t.phi_to_ref is not None:
            t.phi_to_ref.append(self.maps.phi(self.x_ref, x))
        if t.coords is not None:
            t.coords.append(x.copy())
        if t.feasibility is not None:
            t.feasibility.append(self.feasibility(x))
        self.last = n


def _drive(space, T, x1, schedule, stop, update, *, x_ref=None, stride=None,
           record_coords=False, feasibility=None, maps=None):
    maps = maps or _Maps(space)
    x = _as_vector(space, x1).copy()
    rec = _Recorder(maps, x_ref, stride, record_coords, feasibility)
    prev = None
    status = None
    res = math.nan
    n = 0
    for n, (lam, theta) in enumerate(_schedule_values(schedule, stop.max_iter), start=1):
        try:
            tx = T(x)
        except NonFiniteError:
            status = Status.DIVERGED_NONFINITE
            break
        res = maps.dual_norm(tx)
        step = 0.0 if prev is None else maps.norm(x - prev)
        if not math.isfinite(res):
            status = Status.DIVERGED_NONFINITE
            break
        if res <= stop.tol_residual:
            status = Status.CONVERGED_RESIDUAL
        elif prev is not None and stop.tol_step > 0 and step <= stop.tol_step:
            status = Status.CONVERGED_STEP
        elif n == stop.max_iter:
            status = Status.MAX_ITER_REACHED
        rec.add(n, lam, theta, res, step, x, force=status is not None)
        if status is not None:
            break
        try:
            x_next = update(n, x, tx, lam, theta)
        except NonFiniteError:
            status = Status.DIVERGED_NONFINITE
            break
        if not math.isfinite(float(np.sum(x_next))):
            n += 1
            status = Status.DIVERGED_NONFINITE
            x = x_next
            break
        prev, x = x, x_next
    extras = {}
    if status is Status.DIVERGED_NONFINITE:
        extras["diverged_at"] = n
    return SolveReport(status, x, res, n, extras), rec.trace


def _check_schedule(schedule):
    if isinstance(schedule, PowerSchedule):
        require_admissible(schedule)


def solve_zero(space: SpaceSpec, T: MonotoneOperator, x1, schedule, stop: StopRule, **kw):
    """Regularized duality-map iteration anchored at x1.

    Keyword arguments ``x_ref`` (reference zero for the phi_to_ref
    column), ``stride`` and ``record_coords`` control the trace.
    """
    _check_schedule(schedule)
    maps = _Maps(space)
    J, Jinv = maps.J, maps.Jinv
    x1 = _as_vector(space, x1).copy()
    jx1 = J(x1)

    def update(n, x, tx, lam, theta):
        jx = J(x)
        return Jinv(jx - lam * (tx + theta * (jx - jx1)))

    return _drive(space, T, x1, schedule, stop, update, maps=maps, **kw)


def solve_zero_hilbert(space: SpaceSpec, T: MonotoneOperator, x1, schedule, stop: StopRule, **kw):
    """Direct form of :func:`solve_zero` for s = p = 2 (no duality-map calls)."""
    if not space.is_hilbert:
        raise ValueError(f"Hilbert kernel needs s = p = 2, got s={space.s}, p={space.p}")
    _check_schedule(schedule)
    x1 = _as_vector(space, x1).copy()

    def update(n, x, tx, lam, theta):
        return x - lam * tx - lam * theta * (x - x1)

    return _drive(space, T, x1, schedule, stop, update, **kw)


def minimize(space: SpaceSpec, f, grad, x1, schedule, stop: StopRule, h=None, **kw):
    """Minimize a convex functional by driving its gradient to zero."""
    T = gradient_of(space, f, grad, h)
    report, trace = solve_zero(space, T, x1, schedule, stop, **kw)
    fx = float(f(report.x))
    if not math.isfinite(fx) and report.status is not Status.DIVERGED_NONFINITE:
        raise NonFiniteError(f"functional is not finite at the final iterate {report.x}")
    extras = dict(report.extras, f_final=fx)
    return SolveReport(report.status, report.x, report.residual, report.iterations, extras), trace


def solve_vi(space: SpaceSpec, T: MonotoneOperator, family: CyclicFamily, x1, schedule,
             stop: StopRule, check_maps: bool = True, **kw):
    """Anchored iteration with a cyclic family of maps applied before each step.

    In Hilbert mode the direct update is used. Otherwise every map must
    pass :func:`check_quasi_phi_nonexpansive` at the family's witness.
    """
    _check_schedule(schedule)
    maps = _Maps(space)
    x1 = _as_vector(space, x1).copy()
    if not space.is_hilbert and check_maps:
        u = family.witnesses[0]
        for i, m in enumerate(family.maps, start=1):
            worst = check_quasi_phi_nonexpansive(space, m, u, samples=2000)
            if worst > 1e-9:
                raise ValueError(f"map {i} is not quasi-phi_p-nonexpansive (worst residual {worst:.3g})")
    J, Jinv = maps.J, maps.Jinv

    if space.is_hilbert:
        def update(n, x, tx, lam, theta):
            m = family.at(n)
            w = m(x)
            return w - lam * (T(w) + theta * (w - m(x1)))
    else:
        def update(n, x, tx, lam, theta):
            m = family.at(n)
            w = m(x)
            jw = J(w)
            return Jinv(jw - lam * (T(w) + theta * (jw - J(m(x1)))))

    report, trace = _drive(space, T, x1, schedule, stop, update, maps=maps,
                           feasibility=family.infeasibility, **kw)
    extras = dict(report.extras, infeasibility=family.infeasibility(report.x))
    return SolveReport(report.status, report.x, report.residual, report.iterations, extras), trace


class _StepSchedule:
    """Adapts a step-size rule to the (lambda, theta) interface; theta is 0."""

    def __init__(self, stepsizes):
        self.fn = stepsizes if callable(stepsizes) else (lambda n, c=float(stepsizes): c)

    def lam(self, n):
        return float(self.fn(n))

    def theta(self, n):
        return 0.0


def gradient_projection(space: SpaceSpec, T: MonotoneOperator, sets, x1, stepsizes, stop: StopRule, **kw):
    """Projected gradient x+ = P_K(x - eta_n T x); K may be an intersection of sets."""
    if not space.is_hilbert:
        raise ValueError("gradient projection is only defined here for s = p = 2")
    sets = [sets] if isinstance(sets, ConvexSetSpec) else list(sets)

    def update(n, x, tx, eta, _theta):
        return project_intersection(sets, x - eta * tx)

    return _drive(space, T, x1, _StepSchedule(stepsizes), stop, update, **kw)


class ResolventFailure(RuntimeError):
    def __init__(self, message, best_residual, result=None, index=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.result = result
        self.index = index


@dataclass(frozen=True)
class ResolventResult:
    y: np.ndarray
    t: float
    inner_iterations: int
    residual: float


def resolvent(space: SpaceSpec, T: MonotoneOperator, t: float, x, inner_tol: float = 1e-10,
              inner_max: int = 100_000, y0=None) -> ResolventResult:
    """Solve J_p y + t T y = J_p x for y by a damped fixed-point iteration in the dual.

    The step u <- u - beta * (u + t T(J^-1 u) - J_p x) starts with
    beta = 1/(1 + t L), L a Lipschitz estimate of T o J^-1 from two probe
    evaluations, and halves beta whenever the residual fails to decrease.
    """
    if not t > 0:
        raise ValueError(f"t must be > 0, got {t}")
    maps = _Maps(space)
    J, Jinv, dn = maps.J, maps.Jinv, maps.dual_norm
    x = _as_vector(space, x)
    g = J(x)

    y = x.copy() if y0 is None else _as_vector(space, y0).copy()
    u = J(y)
    F = u + t * T(y) - g
    r = dn(F)

    d = 1e-4 * (1.0 + dn(g)) * np.ones(space.n) / space.n
    L = dn(T(Jinv(g + d)) - T(Jinv(g))) / dn(d)
    beta = 1.0 / (1.0 + t * L)

    it = 0
    while r > inner_tol and it < inner_max and beta > 1e-300:
        it += 1
        u_new = u - beta * F
        y_new = Jinv(u_new)
        F_new = u_new + t * T(y_new) - g
        r_new = dn(F_new)
        if r_new < r:
            u, y, F, r = u_new, y_new, F_new, r_new
        else:
            beta *= 0.5
    r = dn(J(y) + t * T(y) - g)
    result = ResolventResult(y, float(t), it, r)
    if not r <= inner_tol:
        raise ResolventFailure(
            f"resolvent did not reach {inner_tol:g} in {it} iterations (best residual {r:.3g})", r, result
        )
    return result


@dataclass(frozen=True)
class PathPoint:
    n: int
    theta: float
    y: np.ndarray
    eq38_residual: float
    resolvent_residual: float
    inner_iterations: int
    eq50_lhs: float | None = None
    eq50_rhs: float | None = None


def regularization_path(space: SpaceSpec, T: MonotoneOperator, x1, schedule, m: int | None = None,
                        inner_tol: float = 1e-10, indices: Sequence[int] | None = None,
                        inner_max: int = 100_000) -> list[PathPoint]:
    """y_n = (J_p + T/theta_n)^-1 J_p x1 along the schedule.

    ``eq38_residual`` is ||T y_n - theta_n (J_p x1 - J_p y_n)||_*. For
    consecutive points the pair ``eq50_lhs`` = ||J y_prev - J y_n||_* and
    ``eq50_rhs`` = (theta_prev/theta_n - 1) ||J y_prev - J x1||_* is kept,
    the former should not exceed the latter.
    """
    if indices is None:
        if m is None or m < 1:
            raise ValueError("m must be >= 1")
        indices = range(1, m + 1)
    maps = _Maps(space)
    J, dn = maps.J, maps.dual_norm
    x1 = _as_vector(space, x1)
    jx1 = J(x1)
    out: list[PathPoint] = []
    y_prev = None
    for n in indices:
        th = schedule.theta(n)
        try:
            rr = resolvent(space, T, 1.0 / th, x1, inner_tol, inner_max, y0=y_prev)
        except ResolventFailure as exc:
            exc.index = n
            raise
        y = rr.y
        jy = J(y)
        eq38 = dn(T(y) - th * (jx1 - jy))
        lhs = rhs = None
        if out:
            prev = out[-1]
            jyp = J(prev.y)
            lhs = dn(jyp - jy)
            rhs = (prev.theta / th - 1.0) * dn(jyp - jx1)
        out.append(PathPoint(n, th, y, eq38, rr.residual, rr.inner_iterations, lhs, rhs))
        y_prev = y
    return out
