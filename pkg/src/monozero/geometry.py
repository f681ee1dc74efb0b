"""Lyapunov functionals phi_p, V_p and residual forms of the duality-map lemmas.

``phi_p(x, y) = ||x||^p - p<J_p y, x> + (p/q)||y||^p`` is p times the Bregman
distance of ||.||^p / p. Each ``lemma*_residual`` returns "right side minus
left side" of an inequality so that a valid inequality gives a residual
that is nonnegative up to rounding.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lp_space import (
    SpaceSpec,
    _as_vector,
    dual_norm,
    duality_map,
    inverse_duality_map,
    lr_norm,
    norm,
    pair,
)

DEFAULT_RTOL = 1e-9


@dataclass(frozen=True)
class FunctionalValue:
    value: float
    components: tuple[float, float, float]


def _terms_phi(space, x, y):
    x = _as_vector(space, x)
    y = _as_vector(space, y)
    p, q = space.p, space.q
    return (
        np.asarray(norm(space, x)) ** p,
        -p * np.asarray(pair(duality_map(space, y), x)),
        (p / q) * np.asarray(norm(space, y)) ** p,
    )


def phi_p_terms(space: SpaceSpec, x, y) -> FunctionalValue:
    a, b, c = (float(t) for t in _terms_phi(space, x, y))
    return FunctionalValue(a + b + c, (a, b, c))


def phi_p(space: SpaceSpec, x, y):
    """Bregman-consistent phi_p(x, y); zero iff x == y."""
    a, b, c = _terms_phi(space, x, y)
    return _out(a + b + c)


def phi_p_verbatim(space: SpaceSpec, x, y):
    """The literal printed form (p/q)||x||^q - p<x, J_p y> + ||y||^p.

    Kept for documentation only: it is not zero on the diagonal for
    p != 2 and is never used by the solvers.
    """
    p, q = space.p, space.q
    val = (
        (p / q) * np.asarray(norm(space, x)) ** q
        - p * np.asarray(pair(duality_map(space, y), x))
        + np.asarray(norm(space, y)) ** p
    )
    return _out(val)


def _terms_v(space, x, f):
    x = _as_vector(space, x)
    f = _as_vector(space, f)
    p, q = space.p, space.q
    return (
        np.asarray(norm(space, x)) ** p,
        -p * np.asarray(pair(f, x)),
        (p / q) * np.asarray(dual_norm(space, f)) ** q,
    )


def v_p_terms(space: SpaceSpec, x, f) -> FunctionalValue:
    a, b, c = (float(t) for t in _terms_v(space, x, f))
    return FunctionalValue(a + b + c, (a, b, c))


def v_p(space: SpaceSpec, x, f):
    """V_p(x, f) in closed form; equals phi_p(x, J_p^{-1} f)."""
    a, b, c = _terms_v(space, x, f)
    return _out(a + b + c)


def _scale(*terms):
    return 1.0 + np.max(np.abs(np.stack(np.broadcast_arrays(*terms))), axis=0)


def lemma4_residual(space: SpaceSpec, x, xstar, ystar, with_scale=False):
    """V_p(x, x*+y*) - V_p(x, x*) - p<y*, J^{-1}x* - x>."""
    xstar = _as_vector(space, xstar)
    ystar = _as_vector(space, ystar)
    lhs = np.asarray(v_p(space, x, xstar + ystar))
    res = lhs - np.asarray(v_p(space, x, xstar)) - space.p * np.asarray(
        pair(ystar, inverse_duality_map(space, xstar) - x)
    )
    return _maybe_scale(res, 1.0 + np.abs(lhs), with_scale)


def lemma5_residual(space: SpaceSpec, x, y, with_scale=False):
    """||x - y||^p - ||y||^p + p<J_p y, x>  (supporting-hyperplane form)."""
    x = _as_vector(space, x)
    y = _as_vector(space, y)
    p = space.p
    a = np.asarray(norm(space, x - y)) ** p
    b = np.asarray(norm(space, y)) ** p
    c = p * np.asarray(pair(duality_map(space, y), x))
    return _maybe_scale(a - b + c, _scale(a, b, c), with_scale)


def lemma6_residual(space: SpaceSpec, x, y, z, with_scale=False):
    """[phi_p(y,x) - phi_p(y,z)] - p<J_p x - J_p z, z - y>."""
    x = _as_vector(space, x)
    y = _as_vector(space, y)
    z = _as_vector(space, z)
    a = np.asarray(phi_p(space, y, x))
    b = np.asarray(phi_p(space, y, z))
    c = space.p * np.asarray(pair(duality_map(space, x) - duality_map(space, z), z - y))
    return _maybe_scale(a - b - c, _scale(a, b, c), with_scale)


def phi_bounds_check(space: SpaceSpec, x, y, rtol: float = DEFAULT_RTOL):
    """Check |‖x‖-‖y‖|^p <= phi_p(x, y) <= (‖x‖+‖y‖)^p.

    Returns (lower_ok, upper_ok); booleans for a single pair, boolean
    arrays for batches. Only defined for p >= 2.
    """
    if space.p < 2.0:
        raise ValueError(f"phi_p sandwich bounds need p >= 2, got p={space.p}")
    nx = np.asarray(norm(space, x))
    ny = np.asarray(norm(space, y))
    phi = np.asarray(phi_p(space, x, y))
    lo = np.abs(nx - ny) ** space.p
    hi = (nx + ny) ** space.p
    slack = rtol * _scale(lo, phi, hi)
    return _out(lo <= phi + slack), _out(phi <= hi + slack)


def holds(residual, scale, rtol: float = DEFAULT_RTOL):
    """True where residual >= -rtol * scale."""
    return np.asarray(residual) >= -rtol * np.asarray(scale)


def lemma9_table(space: SpaceSpec, xs, ys, thresholds):
    """Max ||x - y|| over sampled pairs with phi_p(x, y) below each threshold.

    Rows are (threshold, count, max_distance); max_distance is nan when no
    pair falls under the threshold.
    """
    xs = _as_vector(space, xs)
    ys = _as_vector(space, ys)
    phi = np.asarray(phi_p(space, xs, ys))
    dist = lr_norm(xs - ys, space.s)
    rows = []
    for eps in sorted(thresholds, reverse=True):
        mask = phi <= eps
        rows.append((float(eps), int(mask.sum()), float(dist[mask].max()) if mask.any() else float("nan")))
    return rows


def _maybe_scale(res, scale, with_scale):
    if with_scale:
        return _out(res), _out(np.broadcast_to(scale, np.shape(res)).copy())
    return _out(res)


def _out(a):
    a = np.asarray(a)
    return a.item() if a.ndim == 0 else a
