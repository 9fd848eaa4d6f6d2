"""Benchmark: compiled extension kernel versus pure-Python fallback.

Runs the travel-time-minimizing solve on a range of instance sizes with
both kernels and reports wall-clock times, speedup, and a flow-equality
check (the kernels are deterministic twins, so flows must match arc for
arc).

Usage: python benchmarks/bench_kernels.py [--quick]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from tampernet.control import travel_time_costs
from tampernet.mincost import HAVE_COMPILED_KERNEL, solve_min_cost
from tampernet.scenarios import ScenarioConfig


def bench_one(kind: str, steps: int, rate: float) -> dict:
    cfg = ScenarioConfig(network={"kind": kind}, horizon_steps=steps,
                         demand_rate_veh_hr=rate)
    g = cfg.expand()
    costs = travel_time_costs(g)

    t0 = time.perf_counter()
    sol_py = solve_min_cost(g, costs, force_py=True)
    t_py = time.perf_counter() - t0

    row = {
        "label": cfg.label,
        "arcs": g.n_arcs,
        "demand": int(g.demand_total),
        "objective": sol_py.objective,
        "t_python_s": t_py,
    }
    if HAVE_COMPILED_KERNEL:
        t0 = time.perf_counter()
        sol_c = solve_min_cost(g, costs)
        t_c = time.perf_counter() - t0
        row["t_compiled_s"] = t_c
        row["speedup"] = t_py / t_c if t_c > 0 else float("inf")
        row["flows_equal"] = bool(
            np.array_equal(sol_py.flows, sol_c.flows)
        )
    return row


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true",
                        help="small instances only")
    args = parser.parse_args()

    cases = [("A", 40, 400.0), ("A", 80, 400.0)]
    if not args.quick:
        cases += [("B", 80, 400.0), ("A", 150, 600.0), ("C", 150, 600.0)]

    print(f"compiled kernel available: {HAVE_COMPILED_KERNEL}")
    header = (f"{'instance':<16}{'arcs':>9}{'demand':>8}{'objective':>11}"
              f"{'python[s]':>11}{'compiled[s]':>13}{'speedup':>9}"
              f"{'equal':>7}")
    print(header)
    print("-" * len(header))
    for kind, steps, rate in cases:
        row = bench_one(kind, steps, rate)
        print(f"{row['label']:<16}{row['arcs']:>9}{row['demand']:>8}"
              f"{row['objective']:>11}{row['t_python_s']:>11.3f}"
              f"{row.get('t_compiled_s', float('nan')):>13.3f}"
              f"{row.get('speedup', float('nan')):>9.1f}"
              f"{str(row.get('flows_equal', '-')):>7}")


if __name__ == "__main__":
    main()
