"""Tabulate how far the anchored iterates and the regularization path sit from
the zero of the linear 2x2 example, for a few power schedules.

The path point y_n = (I + G/theta_n)^-1 x1 is what the iteration tracks, so
||y_n|| is a floor for ||x_n|| at step n. For the default schedule that floor
is about theta_n * ||G^-1 x1||, which is still ~3e-2 at n = 2e5.

usage: python3 scripts/schedule_bias_study.py [--max-iter N]
"""
import argparse

import numpy as np

from monozero.lp_space import SpaceSpec
from monozero.operators import example16_operator
from monozero.schedules import PowerSchedule
from monozero.solver import StopRule, solve_zero_hilbert

SCHEDULES = {
    "default (0.9, 0.5, 0.49, 0.25)": PowerSchedule(),
    "fast theta (0.1, 0, 0.01, 0.99)": PowerSchedule(0.1, 0.0, 0.01, 0.99),
    "moderate (0.1, 0.1, 0.2, 0.8)": PowerSchedule(0.1, 0.1, 0.2, 0.8),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-iter", type=int, default=200_000)
    args = ap.parse_args()

    T = example16_operator()
    G = T.meta["G"]
    x1 = np.array([10.0, -10.0])
    space = SpaceSpec.hilbert(2)
    checkpoints = [10**k for k in range(1, 7) if 10**k <= args.max_iter] + [args.max_iter]
    checkpoints = sorted(set(checkpoints))

    for name, sched in SCHEDULES.items():
        _, tr = solve_zero_hilbert(space, T, x1, sched, StopRule(1e-300, 0, args.max_iter),
                                   stride=1, record_coords=True)
        print(f"\n{name}")
        print(f"{'n':>9} {'theta_n':>11} {'||y_n||':>11} {'||x_n||':>11}")
        for n in checkpoints:
            th = sched.theta(n)
            y = np.linalg.solve(np.eye(2) + G / th, x1)
            print(f"{n:>9} {th:>11.3e} {np.linalg.norm(y):>11.3e} {np.linalg.norm(tr.coords[n - 1]):>11.3e}")
        a = np.linalg.norm(np.linalg.solve(G, x1))
        need = (sched.theta0 * a / 1e-4) ** (1 / sched.b)
        print(f"  steps until the path floor drops below 1e-4: about {need:.2e}")


if __name__ == "__main__":
    main()
