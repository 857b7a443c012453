"""Benchmark: compiled trajectory kernel vs pure-Python reference.

Both kernels consume identical per-paper RNG streams and produce
bit-identical trajectories; this script measures the speed gap on the
default calibration at a few ensemble sizes.

Run:  python benchmarks/bench_backends.py
"""

import os
import time

import numpy as np

import citedyn


def run(n, horizon, seed, force_python):
    if force_python:
        os.environ["CITEDYN_FORCE_PYTHON"] = "1"
    else:
        os.environ.pop("CITEDYN_FORCE_PYTHON", None)
    params = citedyn.ModelParams()
    curves = citedyn.default_curves()
    t0 = time.perf_counter()
    result = citedyn.simulate_ensemble(n, params, curves, master_seed=seed,
                                       horizon=horizon)
    return time.perf_counter() - t0, result


def main():
    have_compiled = citedyn.backend() == "cython"
    print(f"compiled core available: {have_compiled}")
    print(f"{'n_papers':>10} {'horizon':>8} {'python [s]':>11} "
          f"{'cython [s]':>11} {'speedup':>8}  identical")
    for n in (2_000, 10_000, 40_195):
        horizon = 25
        t_py, res_py = run(n, horizon, seed=42, force_python=True)
        if have_compiled:
            t_cy, res_cy = run(n, horizon, seed=42, force_python=False)
            same = np.array_equal(res_py.k, res_cy.k)
            print(f"{n:>10} {horizon:>8} {t_py:>11.3f} {t_cy:>11.3f} "
                  f"{t_py / t_cy:>7.1f}x  {same}")
        else:
            print(f"{n:>10} {horizon:>8} {t_py:>11.3f} {'-':>11} {'-':>8}  -")
    os.environ.pop("CITEDYN_FORCE_PYTHON", None)


if __name__ == "__main__":
    main()
