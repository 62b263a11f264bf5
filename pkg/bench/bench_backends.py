"""Time the compiled core against the pure-Python fallback.

    python bench/bench_backends.py [--repeat N]

Both backends run identical workloads and must produce identical results;
the script checks that before reporting the speedup.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from ctlsearch import _backend
from ctlsearch.robot import RobotHeuristic, robot_control_space
from ctlsearch.search import StopRule, run_algorithm
from ctlsearch.space import ControlSpace, make_rng, to_values
from ctlsearch.synthetic import make_synthetic
from ctlsearch.world import WorldParams, generate_world


def _best(fn, repeat: int):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def workloads():
    world = generate_world(WorldParams.preset("wide"), 3)
    robot = RobotHeuristic(world)
    coarse = robot_control_space("coarse")
    plans = [to_values(coarse, c) for c in np.random.default_rng(0).integers(0, 9, (500, 4))]
    syn_space = ControlSpace.uniform(3, 5)
    syn = make_synthetic(syn_space, 6.0, make_rng(1))

    def rollouts(backend):
        k = robot.kernel(_backend.get(backend))
        return [k(p) for p in plans]

    def session(name, space, h, cap):
        def run(backend):
            s = run_algorithm(name, space, h, StopRule(None, cap), make_rng(2, 1), backend=backend)
            return s.best_cost, s.cycles, s.curve
        return run

    return [
        ("robot rollout x500", 500, rollouts),
        ("robot rrhc 2000 cycles", 2000, session("rrhc", coarse, robot, 2000)),
        ("synthetic grid 35937 cycles", 35937, session("grid", syn_space, syn, 10**6)),
        ("synthetic random 20000 cycles", 20000, session("random", syn_space, syn, 20000)),
        ("synthetic rrhc 20000 cycles", 20000, session("rrhc", syn_space, syn, 20000)),
    ]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3, help="timing repeats, best kept (default: 3)")
    args = ap.parse_args(argv)
    if not _backend.COMPILED:
        print("compiled core not built; nothing to compare")
        return 1
    print(f"{'workload':<32}{'python s':>10}{'compiled s':>12}{'us/eval py':>12}{'us/eval c':>11}{'speedup':>9}")
    for name, evals, fn in workloads():
        tp, rp = _best(lambda: fn("python"), 1)
        tc, rc = _best(lambda: fn("compiled"), args.repeat)
        if rp != rc:
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:<32}{tp:>10.3f}{tc:>12.4f}{1e6 * tp / evals:>12.1f}{1e6 * tc / evals:>11.2f}"
              f"{tp / tc:>8.0f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
