"""Builders turning a :class:`ProblemConfig` into operators, functionals and sets.

The quartic test functional f(x) = 1/4 sum (x_i - c_i)^4 + 1/2 ||x - c||^2 is
convex, coercive and uniquely minimized at c, which makes it a usable
minimization target where a non-coercive polynomial would not be.
"""
from __future__ import annotations

import numpy as np

from ..operators import gradient_of, linear_map, power_map
from ..projections import ConvexSetSpec, CyclicFamily


def quadratic(c):
    c = np.asarray(c, float)
    return (lambda x: 0.5 * float(np.dot(x - c, x - c))), (lambda x: x - c)


def quartic(c):
    c = np.asarray(c, float)

    # overflow to inf is reported by the solver as divergence
    def f(x):
        d = x - c
        with np.errstate(over="ignore"):
            return 0.25 * float(np.sum(d**4)) + 0.5 * float(np.dot(d, d))

    def grad(x):
        d = x - c
        with np.errstate(over="ignore"):
            return d**3 + d

    return f, grad


def constant(c):
    n = np.asarray(c).size
    return (lambda x: 0.0), (lambda x: np.zeros(n))


FUNCTIONAL_BUILDERS = {"quadratic": quadratic, "quartic": quartic, "constant": constant}


def build_functional(cfg):
    o = cfg.operator
    c = np.zeros(cfg.space.n) if o.center is None else np.array(o.center)
    return FUNCTIONAL_BUILDERS[o.functional](c)


def build_operator(cfg):
    o = cfg.operator
    space = cfg.space
    if o.builtin == "power":
        return power_map(space)
    if o.builtin == "linear":
        G = np.array(o.matrix).reshape(space.n, space.n)
        return linear_map(space, G, o.offset)
    f, grad = build_functional(cfg)
    return gradient_of(space, f, None if o.finite_difference else grad, o.h, label=f"grad {o.functional}")


def build_sets(cfg) -> list[ConvexSetSpec]:
    out = []
    for d in cfg.family:
        args = {k: v for k, v in d.items() if k != "kind"}
        out.append(getattr(ConvexSetSpec, d["kind"])(cfg.space, **args))
    return out


def build_family(cfg) -> CyclicFamily:
    return CyclicFamily.from_sets(build_sets(cfg))
