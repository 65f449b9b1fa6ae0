"""Compare the compiled and numpy protocol kernels.

    python benchmarks/bench_protocol.py [--runs 20000] [--k 20]

Times ``ordered_stops`` from both backends on the same local statistics, checks
that they agree exactly, and times a full experiment under each backend.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from ordered_ggm import _kernels_py
from ordered_ggm.model import make_chain_scenario
from ordered_ggm.statistic import build_local_set, local_stats

try:
    from ordered_ggm import _kernels
except ImportError:
    _kernels = None

EXPERIMENT = """
import time
from ordered_ggm import kernels
from ordered_ggm.experiment import ExperimentConfig, run_experiment
cfg = ExperimentConfig(scenario={{"generator": "chain", "k": {k}, "m": 5, "alpha": 5.0}},
                       n_runs={runs}, n_bound_samples=1)
t = time.perf_counter(); run_experiment(cfg); print(kernels.BACKEND, time.perf_counter() - t)
"""


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--runs", type=int, default=20000)
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()

    sc = make_chain_scenario(args.k, 5, 5.0)
    lset = build_local_set(sc)
    x = np.random.default_rng(0).standard_normal((args.runs, sc.n_nodes)) @ sc.chol.T
    values = local_stats(lset, x)

    kernels = {"python": _kernels_py.ordered_stops}
    if _kernels is not None:
        kernels["cython"] = _kernels.ordered_stops
    results = {}
    print(f"ordered_stops on {args.runs} x {args.k} local statistics (best of {args.repeat})")
    for name, fn in kernels.items():
        best = min(timeit.repeat(lambda: fn(values, 0.0), number=1, repeat=args.repeat))
        results[name] = fn(values, 0.0)
        print(f"  {name:<7} {best * 1e3:9.2f} ms  {best / args.runs * 1e6:7.3f} us/run")
    if len(results) == 2:
        (s0, d0), (s1, d1) = results.values()
        print(f"  identical output: {np.array_equal(s0, s1) and np.array_equal(d0, d1)}")

    print("run_experiment end to end")
    code = EXPERIMENT.format(k=args.k, runs=args.runs)
    for pure in ("", "1"):
        env = dict(os.environ, ORDERED_GGM_PURE_PYTHON=pure)
        if not pure:
            env.pop("ORDERED_GGM_PURE_PYTHON")
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        name, secs = out.stdout.split()
        print(f"  {name:<7} {float(secs) * 1e3:9.2f} ms")


if __name__ == "__main__":
    main()
