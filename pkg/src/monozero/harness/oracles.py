"""Brute-force reference solutions, kept independent of the solver kernels."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..lp_space import dual_norm
from ..operators import MonotoneOperator
from ..projections import ConvexSetSpec, project


class OracleFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleSolution:
    point: np.ndarray
    method: str
    residual: float
    tolerance: float


def _fd_jacobian(T, x):
    n = x.size
    h = 1e-6 * max(np.max(np.abs(x)), 1e-6)
    Jm = np.empty((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        Jm[:, i] = (T(x + e) - T(x - e)) / (2 * h)
    return Jm


def _newton(T, x, tol, max_iter=200):
    fx = T(x)
    r = np.linalg.norm(fx)
    for _ in range(max_iter):
        if r <= tol:
            break
        try:
            d = np.linalg.lstsq(_fd_jacobian(T, x), -fx, rcond=None)[0]
        except np.linalg.LinAlgError:
            break
        alpha = 1.0
        while alpha > 1e-12:
            xt = x + alpha * d
            ft = T(xt)
            rt = np.linalg.norm(ft)
            if np.isfinite(rt) and rt < (1 - 1e-4 * alpha) * r:
                break
            alpha *= 0.5
        else:
            break
        x, fx, r = xt, ft, rt
    return x, r


def _grid_search(T, region, levels=40, pts=41):
    center, half = np.zeros(2), float(region)
    best = None
    for _ in range(levels):
        g = np.linspace(-half, half, pts)
        U, V = np.meshgrid(center[0] + g, center[1] + g)
        cand = np.stack([U.ravel(), V.ravel()], axis=1)
        vals = np.array([np.linalg.norm(T(c)) for c in cand])
        best = cand[np.argmin(vals)]
        center, half = best, half * 4.0 / (pts - 1)
    return best


def oracle_zero(T: MonotoneOperator, region: float = 10.0, tol: float = 1e-10,
                starts: int = 8, seed: int = 0) -> OracleSolution:
    """Damped Newton with a central-difference Jacobian from several seeded starts.

    For n <= 2 a coarse-to-fine grid search supplies a last starting point.
    Only roots with ||x||_inf <= region are accepted.
    """
    space = T.space
    if space.n > 10:
        raise ValueError("dense oracle limited to n <= 10")
    rng = np.random.default_rng(seed)
    inits = [np.zeros(space.n)] + list(rng.uniform(-region, region, size=(starts, space.n)))
    best_x, best_r = None, np.inf
    for x0 in inits:
        x, _ = _newton(T, np.asarray(x0, float), tol)
        r = float(dual_norm(space, T(x)))
        if not np.max(np.abs(x)) <= region:
            continue
        if r < best_r:
            best_x, best_r = x, r
        if r <= tol:
            return OracleSolution(x, "newton", r, tol)
    if space.n <= 2:
        x0 = _grid_search(T, region) if space.n == 2 else np.array([_grid_1d(T, region)])
        x, _ = _newton(T, x0, tol)
        r = float(dual_norm(space, T(x)))
        if r <= tol and np.max(np.abs(x)) <= region:
            return OracleSolution(x, "newton", r, tol)
    raise OracleFailure(f"no zero found in region radius {region} (best residual {best_r:.3g})")


def _grid_1d(T, region, levels=40, pts=41):
    c, half = 0.0, float(region)
    for _ in range(levels):
        g = c + np.linspace(-half, half, pts)
        c = g[np.argmin([abs(T(np.array([v]))[0]) for v in g])]
        half *= 4.0 / (pts - 1)
    return c


def _dykstra(sets, x, tol=1e-13, max_sweeps=200_000):
    if len(sets) == 1:
        return project(sets[0], x)
    y = np.array(x, float)
    corr = [np.zeros_like(y) for _ in sets]
    for _ in range(max_sweeps):
        start = y.copy()
        for k, cset in enumerate(sets):
            shifted = y + corr[k]
            y = project(cset, shifted)
            corr[k] = shifted - y
        if np.linalg.norm(y - start) <= tol:
            if all(c.contains(y, 1e-9) for c in sets):
                return y
    raise OracleFailure("cyclic projections did not reach the intersection")


def oracle_vi(T: MonotoneOperator, sets: list[ConvexSetSpec], tol: float = 1e-9,
              witness=None, max_iter: int = 1_000_000) -> OracleSolution:
    """Small-step projected gradient on C = intersection of ``sets``.

    Solves <y - x*, T x*> >= 0 for all y in C and certifies the natural
    residual ||x - P_C(x - T x)|| <= tol.
    """
    space = T.space
    if not space.is_hilbert:
        raise ValueError("oracle_vi needs a Hilbert space (s = p = 2)")
    sets = list(sets)
    if witness is not None and not all(c.contains(witness, 1e-9) for c in sets):
        raise OracleFailure("witness is not in the intersection")
    x = _dykstra(sets, np.zeros(space.n) if witness is None else witness)
    # Lipschitz estimate from the finite-difference Jacobian at the start
    L = max(np.linalg.norm(_fd_jacobian(T, x), 2), 1e-12)
    gamma = 0.1 / L
    for _ in range(max_iter):
        x_new = _dykstra(sets, x - gamma * T(x))
        done = np.linalg.norm(x_new - x) <= 1e-3 * gamma * tol
        x = x_new
        if done:
            break
    r = float(np.linalg.norm(x - _dykstra(sets, x - T(x))))
    if not r <= tol:
        raise OracleFailure(f"projected gradient stalled at natural residual {r:.3g}")
    return OracleSolution(x, "projected_gradient", r, tol)
