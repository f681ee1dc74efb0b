"""Operators T: R^n -> R^n (primal to dual) with declared (p, eta) claims."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .lp_space import SpaceSpec, _as_vector, lr_norm, norm, pair


class NonFiniteError(FloatingPointError):
    """An operator or functional produced a non-finite value."""


@dataclass(frozen=True)
class MonotoneOperator:
    """A single-valued map T with its claimed strong-monotonicity constants.

    ``eta_claim`` is metadata only; :func:`certify_strong_monotonicity`
    measures the real constant.
    """

    apply: Callable[[np.ndarray], np.ndarray]
    space: SpaceSpec
    p_claim: float
    eta_claim: float
    label: str = "T"
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, x) -> np.ndarray:
        return self.apply(np.asarray(x, dtype=float))


def power_map(space: SpaceSpec) -> MonotoneOperator:
    """T x = ||x||_2^(p-2) x, (p, 2^(2-p))-strongly monotone for p >= 2."""
    p = space.p
    if p < 2.0:
        raise ValueError(f"power map needs p >= 2, got p={p}")

    if p == 2.0:
        def apply(x):
            return x.copy()
    else:
        def apply(x):
            return np.sqrt(np.dot(x, x)) ** (p - 2.0) * x

    return MonotoneOperator(apply, space, p, 2.0 ** (2.0 - p), f"power(p={p:g})")


def linear_map(space: SpaceSpec, G, b=None) -> MonotoneOperator:
    """T x = G x - b; eta_claim is the smallest eigenvalue of (G + G^T)/2."""
    G = np.array(G, dtype=float)
    if G.shape != (space.n, space.n):
        raise ValueError(f"matrix must be {space.n}x{space.n}, got {G.shape}")
    b = np.zeros(space.n) if b is None else _as_vector(space, b).copy()
    eig_min = float(np.linalg.eigvalsh(0.5 * (G + G.T))[0])
    if not eig_min > 0.0:
        raise ValueError(
            f"symmetric part of G is not positive definite (smallest eigenvalue {eig_min:.6g})"
        )

    def apply(x):
        return G @ x - b

    return MonotoneOperator(apply, space, 2.0, eig_min, "linear", {"G": G, "b": b})


def example16_operator() -> MonotoneOperator:
    """The 2x2 linear operator with G = [[8, -5], [5, 13]]."""
    return linear_map(SpaceSpec.hilbert(2), [[8.0, -5.0], [5.0, 13.0]])


def gradient_of(
    space: SpaceSpec,
    f: Callable[[np.ndarray], float],
    grad: Callable[[np.ndarray], np.ndarray] | None = None,
    h: float | None = None,
    label: str = "grad f",
    eta_claim: float = float("nan"),
) -> MonotoneOperator:
    """Wrap the gradient of a functional as an operator.

    Without ``grad`` a central difference is used with step
    ``h`` (default 1e-6 * (1 + ||x||_inf)). ``eta_claim`` stays nan
    unless the caller knows a strong-convexity constant.
    """
    if grad is not None:
        def apply(x):
            g = np.asarray(grad(x), dtype=float)
            if not np.all(np.isfinite(g)):
                raise NonFiniteError(f"gradient is not finite at {x}")
            return g
    else:
        def apply(x):
            step = h if h is not None else 1e-6 * (1.0 + np.max(np.abs(x)))
            g = np.empty(space.n)
            for i in range(space.n):
                e = np.zeros(space.n)
                e[i] = step
                fp, fm = f(x + e), f(x - e)
                if not (np.isfinite(fp) and np.isfinite(fm)):
                    raise NonFiniteError(f"functional is not finite near {x}")
                g[i] = (fp - fm) / (2.0 * step)
            return g

    return MonotoneOperator(apply, space, 2.0, eta_claim, label, {"f": f})


@dataclass(frozen=True)
class MonotonicityCertificate:
    eta_hat: float
    worst_pair: tuple[np.ndarray, np.ndarray]
    samples: int
    region_radius: float
    seed: int


def sample_ball(rng: np.random.Generator, n: int, count: int, radius: float) -> np.ndarray:
    """Uniform samples from the Euclidean ball of the given radius."""
    d = rng.standard_normal((count, n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    r = radius * rng.random((count, 1)) ** (1.0 / n)
    return r * d


def monotonicity_quotient(T: MonotoneOperator, x, y, p: float) -> float:
    space = T.space
    d = np.asarray(x, float) - np.asarray(y, float)
    return float(pair(T(x) - T(y), d) / norm(space, d) ** p)


def certify_strong_monotonicity(
    T: MonotoneOperator, p: float, samples: int = 10_000, radius: float = 1.0, seed: int = 0
) -> MonotonicityCertificate:
    """Empirical inf of <Tx - Ty, x - y> / ||x - y||^p over random pairs."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if not radius > 0:
        raise ValueError("radius must be > 0")
    space = T.space
    rng = np.random.default_rng(seed)
    xs = sample_ball(rng, space.n, samples, radius)
    ys = sample_ball(rng, space.n, samples, radius)
    best, worst = np.inf, None
    for x, y in zip(xs, ys):
        d = x - y
        dn = float(lr_norm(d, space.s))
        if dn == 0.0:
            continue
        tx, ty = T(x), T(y)
        if not (np.all(np.isfinite(tx)) and np.all(np.isfinite(ty))):
            raise NonFiniteError(f"{T.label} produced a non-finite value")
        quot = float(np.dot(tx - ty, d)) / dn**p
        if quot < best:
            best, worst = quot, (x, y)
    if worst is None:
        raise ValueError("all sampled pairs coincided")
    return MonotonicityCertificate(best, worst, samples, float(radius), seed)


def coercivity_probe(T: MonotoneOperator, radii, directions: int = 64, seed: int = 0):
    """Rows (radius, min over directions of <x, Tx>/||x||) with ||x|| = radius."""
    radii = [float(r) for r in radii]
    if any(r <= 0 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and strictly increasing")
    space = T.space
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((directions, space.n))
    dirs /= lr_norm(dirs, space.s)[:, None]
    rows = []
    for r in radii:
        vals = []
        for d in dirs:
            x = r * d
            tx = T(x)
            if not np.all(np.isfinite(tx)):
                raise NonFiniteError(f"{T.label} produced a non-finite value at radius {r}")
            vals.append(float(np.dot(x, tx)) / r)
        rows.append((r, min(vals)))
    return rows
