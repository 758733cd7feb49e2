"""Benchmark the compiled trial kernel against the pure-Python mirror.

Runs the same replication workload (patient generation, milestone cutoffs,
Cox fits) through both backends and reports wall time and throughput.

    python3 benchmarks/backend_bench.py [--reps 20000] [--patients 120]
"""

import argparse
import importlib
import math
import time

import numpy as np

from osmon.guideline import AnalysisPlan
from osmon.trial import TrialScenario, generate_patients


def kernels():
    out = {"python": importlib.import_module("osmon._trial_kernel_py")}
    try:
        out["compiled"] = importlib.import_module("osmon._trial_kernel")
    except ImportError:
        print("compiled kernel not built; benchmarking the python backend only")
    return out


def run(kernel, scenario, targets, reps):
    met = 0
    start = time.perf_counter()
    for rep in range(reps):
        table = generate_patients(scenario, rep)
        observable = table.death_time <= table.dropout_time
        cal = np.sort(table.entry[observable] + table.death_time[observable])
        cutoffs = np.empty(len(targets))
        reached = np.empty(len(targets), dtype=np.uint8)
        for m, target in enumerate(targets):
            reached[m] = target <= cal.size
            cutoffs[m] = cal[target - 1] if reached[m] else math.nan
        fits = kernel.fit_milestones(
            table.entry, table.death_time, table.dropout_time, table.arm,
            cutoffs, reached,
        )
        met += int((fits[:, 2] == 0).sum())
    return time.perf_counter() - start, met


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=20_000)
    parser.add_argument("--patients", type=int, default=120)
    args = parser.parse_args()

    scenario = TrialScenario(
        n_patients=args.patients,
        accrual_months=12.0,
        control_median_os_months=30.0,
        true_os_hr=0.7,
        k=1.0,
        annual_dropout_prob=0.02,
        rng_seed=20260824,
    )
    targets = [m.deaths for m in AnalysisPlan.from_deaths([28, 42, 70]).milestones]

    results = {}
    for name, kernel in kernels().items():
        elapsed, met = run(kernel, scenario, targets, args.reps)
        results[name] = (elapsed, met)
        print(
            f"{name:>8}: {elapsed:7.2f} s for {args.reps} reps "
            f"({args.reps / elapsed:,.0f} reps/s), {met} converged fits"
        )

    if len(results) == 2:
        py, comp = results["python"][0], results["compiled"][0]
        print(f"speedup: {py / comp:.1f}x")
        assert results["python"][1] == results["compiled"][1], "backends disagree"


if __name__ == "__main__":
    main()
