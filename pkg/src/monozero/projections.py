"""Euclidean projections onto simple convex sets and cyclic map families."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .geometry import phi_p
from .lp_space import SpaceSpec, _as_vector

KINDS = ("box", "ball", "halfspace")


@dataclass(frozen=True)
class ConvexSetSpec:
    """A box, ball or halfspace {y : <a, y> <= c} in R^n."""

    kind: str
    space: SpaceSpec
    lo: np.ndarray | None = None
    hi: np.ndarray | None = None
    center: np.ndarray | None = None
    radius: float | None = None
    normal: np.ndarray | None = None
    offset: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown set kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "box":
            lo, hi = _as_vector(self.space, self.lo), _as_vector(self.space, self.hi)
            if np.any(lo > hi):
                raise ValueError("box needs lo <= hi componentwise")
            object.__setattr__(self, "lo", lo)
            object.__setattr__(self, "hi", hi)
        elif self.kind == "ball":
            object.__setattr__(self, "center", _as_vector(self.space, self.center))
            if self.radius is None or not self.radius > 0:
                raise ValueError("ball radius must be > 0")
        else:
            a = _as_vector(self.space, self.normal)
            if not np.any(a != 0):
                raise ValueError("halfspace normal must be nonzero")
            object.__setattr__(self, "normal", a)
            object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def box(cls, space, lo, hi):
        return cls("box", space, lo=lo, hi=hi)

    @classmethod
    def ball(cls, space, center, radius):
        return cls("ball", space, center=center, radius=float(radius))

    @classmethod
    def halfspace(cls, space, normal, offset):
        return cls("halfspace", space, normal=normal, offset=offset)

    def contains(self, x, tol: float = 1e-12) -> bool:
        x = np.asarray(x, float)
        if self.kind == "box":
            return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))
        if self.kind == "ball":
            return bool(np.linalg.norm(x - self.center) <= self.radius + tol)
        return bool(np.dot(self.normal, x) <= self.offset + tol)

    def to_dict(self) -> dict:
        if self.kind == "box":
            return {"kind": "box", "lo": self.lo.tolist(), "hi": self.hi.tolist()}
        if self.kind == "ball":
            return {"kind": "ball", "center": self.center.tolist(), "radius": self.radius}
        return {"kind": "halfspace", "normal": self.normal.tolist(), "offset": self.offset}


def project(cset: ConvexSetSpec, x) -> np.ndarray:
    """Nearest point of the set to x in the Euclidean norm."""
    x = _as_vector(cset.space, x)
    if cset.kind == "box":
        return np.clip(x, cset.lo, cset.hi)
    if cset.kind == "ball":
        d = x - cset.center
        r = np.linalg.norm(d)
        if r <= cset.radius:
            return x.copy()
        return cset.center + (cset.radius / r) * d
    a = cset.normal
    excess = float(np.dot(a, x)) - cset.offset
    if excess <= 0:
        return x.copy()
    return x - (excess / float(np.dot(a, a))) * a


def project_intersection(sets: Sequence[ConvexSetSpec], x, tol: float = 1e-12, max_sweeps: int = 100_000):
    """Euclidean projection onto an intersection via Dykstra's algorithm."""
    sets = list(sets)
    x = np.asarray(x, float)
    if len(sets) == 1:
        return project(sets[0], x)
    y = x.copy()
    incs = [np.zeros_like(x) for _ in sets]
    for _ in range(max_sweeps):
        y_old = y
        for i, cset in enumerate(sets):
            z = project(cset, y + incs[i])
            incs[i] = y + incs[i] - z
            y = z
        if np.linalg.norm(y - y_old) <= tol and all(c.contains(y, 1e-10) for c in sets):
            return y
    raise RuntimeError(f"Dykstra projection did not converge in {max_sweeps} sweeps")


def cyclic_index(n: int, N: int) -> int:
    """1-based index ((n - 1) mod N) + 1 of the map used at step n."""
    if n < 1:
        raise ValueError(f"step index must be >= 1, got {n}")
    if N < 1:
        raise ValueError(f"family size must be >= 1, got {N}")
    return (n - 1) % N + 1


@dataclass(frozen=True)
class CyclicFamily:
    """Self-maps applied cyclically, with points known to be common fixed points."""

    maps: tuple[Callable[[np.ndarray], np.ndarray], ...]
    witnesses: tuple[np.ndarray, ...]
    sets: tuple[ConvexSetSpec, ...] = field(default=())
    fixed_tol: float = 1e-10

    def __post_init__(self):
        if len(self.maps) < 1:
            raise ValueError("a cyclic family needs at least one map")
        if len(self.witnesses) < 1:
            raise ValueError("a cyclic family needs at least one common fixed point witness")
        for u in self.witnesses:
            for i, m in enumerate(self.maps, start=1):
                if np.linalg.norm(m(u) - u) > self.fixed_tol:
                    raise ValueError(f"witness {np.asarray(u).tolist()} is not fixed by map {i}")

    @property
    def N(self) -> int:
        return len(self.maps)

    def at(self, n: int):
        return self.maps[cyclic_index(n, self.N) - 1]

    @classmethod
    def from_sets(cls, sets: Sequence[ConvexSetSpec], witness=None) -> "CyclicFamily":
        """Projections onto each set; the witness defaults to a point of the intersection."""
        sets = tuple(sets)
        if not sets:
            raise ValueError("need at least one set")
        if witness is None:
            witness = project_intersection(sets, np.zeros(sets[0].space.n))
        maps = tuple(_projector(c) for c in sets)
        return cls(maps, (np.asarray(witness, float),), sets)

    def infeasibility(self, x) -> float:
        """max_i ||x - map_i(x)||, zero exactly on the common fixed-point set."""
        return max(float(np.linalg.norm(x - m(x))) for m in self.maps)


def _projector(cset):
    def proj(x):
        return project(cset, x)
    proj.__name__ = f"project_{cset.kind}"
    return proj


def check_quasi_phi_nonexpansive(
    space: SpaceSpec,
    mapping: Callable[[np.ndarray], np.ndarray],
    u,
    samples: int = 10_000,
    seed: int = 0,
    radius: float = 10.0,
) -> float:
    """Worst scaled violation of phi_p(u, map(x)) <= phi_p(u, x) over random x.

    Each sample contributes (phi_p(u, map x) - phi_p(u, x)) / (1 + phi_p(u, x)),
    so a quasi-phi_p-nonexpansive map returns at most ~1e-9.
    """
    u = _as_vector(space, u)
    if np.linalg.norm(mapping(u) - u) > 1e-10:
        raise ValueError("u is not a fixed point of the map")
    rng = np.random.default_rng(seed)
    xs = u + radius * rng.standard_normal((samples, space.n))
    mx = np.array([mapping(x) for x in xs])
    before = phi_p(space, u, xs)
    return float(np.max((phi_p(space, u, mx) - before) / (1.0 + before)))
