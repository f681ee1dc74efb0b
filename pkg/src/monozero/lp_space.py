"""Finite-dimensional l_s spaces and the generalized duality map J_p.

Vectors are plain numpy arrays whose last axis has length ``space.n``.
Primal vectors live in (R^n, ||.||_s); dual covectors live in
(R^n, ||.||_{s'}) with s' = s/(s-1). Every function broadcasts over
leading axes, so a batch of vectors is an array of shape (m, n).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DimensionMismatch(ValueError):
    """Raised when a vector's trailing dimension does not match the space."""


def conjugate_exponent(t: float) -> float:
    """Return t/(t-1), the Hölder conjugate of an exponent t > 1."""
    t = float(t)
    if not t > 1.0:
        raise ValueError(f"exponent must be > 1, got {t}")
    return t / (t - 1.0)


@dataclass(frozen=True)
class SpaceSpec:
    """R^n with the s-norm and the duality map of gauge t -> t^(p-1)."""

    n: int
    s: float = 2.0
    p: float = 2.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.n}")
        if not self.s > 1.0:
            raise ValueError(f"norm exponent s must be > 1, got {self.s}")
        if not self.p > 1.0:
            raise ValueError(f"gauge exponent p must be > 1, got {self.p}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "s", float(self.s))
        object.__setattr__(self, "p", float(self.p))

    @classmethod
    def hilbert(cls, n: int) -> "SpaceSpec":
        return cls(n=n, s=2.0, p=2.0)

    @property
    def s_dual(self) -> float:
        return conjugate_exponent(self.s)

    @property
    def q(self) -> float:
        return conjugate_exponent(self.p)

    @property
    def is_hilbert(self) -> bool:
        return self.s == 2.0 and self.p == 2.0


def _as_vector(space: SpaceSpec, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim == 0 or v.shape[-1] != space.n:
        raise DimensionMismatch(
            f"expected trailing dimension {space.n}, got shape {v.shape}"
        )
    return v


def lr_norm(v: np.ndarray, r: float) -> np.ndarray:
    """(sum |v_i|^r)^(1/r) along the last axis, scaled to avoid overflow."""
    a = np.abs(v)
    m = np.max(a, axis=-1, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    out = m * np.sum((a / safe) ** r, axis=-1, keepdims=True) ** (1.0 / r)
    return out[..., 0]


def _jmap(v: np.ndarray, r: float, g: float) -> np.ndarray:
    # ||v||_r^(g-1) * sign(u)|u|^(r-1) with u = v/||v||_r; zero at the origin
    if r == g:
        return np.sign(v) * np.abs(v) ** (r - 1.0)
    nrm = lr_norm(v, r)[..., None]
    safe = np.where(nrm > 0, nrm, 1.0)
    u = v / safe
    return np.where(nrm > 0, safe ** (g - 1.0), 0.0) * np.sign(u) * np.abs(u) ** (r - 1.0)


def norm(space: SpaceSpec, x) -> np.ndarray | float:
    """s-norm of a primal vector."""
    return _scalar(lr_norm(_as_vector(space, x), space.s))


def dual_norm(space: SpaceSpec, f) -> np.ndarray | float:
    """s'-norm of a dual covector."""
    return _scalar(lr_norm(_as_vector(space, f), space.s_dual))


def pair(f, x) -> np.ndarray | float:
    """Duality pairing <f, x> = sum f_i x_i."""
    f = np.asarray(f, dtype=float)
    x = np.asarray(x, dtype=float)
    if f.ndim == 0 or x.ndim == 0 or f.shape[-1] != x.shape[-1]:
        raise DimensionMismatch(f"cannot pair shapes {f.shape} and {x.shape}")
    return _scalar(np.sum(f * x, axis=-1))


def duality_map(space: SpaceSpec, x) -> np.ndarray:
    """J_p x, the unique f with <f, x> = ||x||^p and ||f||_* = ||x||^(p-1)."""
    return _jmap(_as_vector(space, x), space.s, space.p)


def inverse_duality_map(space: SpaceSpec, f) -> np.ndarray:
    """Two-sided inverse of :func:`duality_map`.

    This is the duality map of the dual space (exponent s') with gauge
    exponent q = p/(p-1); with gauge p instead it would not invert J_p
    unless p = 2.
    """
    return _jmap(_as_vector(space, f), space.s_dual, space.q)


def _scalar(a: np.ndarray):
    return float(a) if np.ndim(a) == 0 else a
