"""Time the compiled inner-maximizer kernels against the pure-Python twin.

Both backends consume the caller's random generator draw-for-draw, so
besides wall-clock numbers this doubles as an end-to-end parity check on
realistic workloads: same best index, same best value, same stream.

Run:  python3 benchmarks/compare_backends.py [--repeats N]
"""

import argparse
import time

import numpy as np

from gencurate import bench
from gencurate._inner import load_backend


def time_calls(fn, args_fn, repeats):
    best = np.inf
    result = None
    for rep in range(repeats):
        args = args_fn(rep)
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    try:
        native = load_backend("native")
    except ImportError:
        raise SystemExit(
            "native backend not built; run pip install -e . --no-build-isolation"
        )
    python = load_backend("python")

    ackley = bench.make_ackley2d()
    dims = np.asarray(ackley.space.shape, dtype=np.int64)
    grid_base = np.ascontiguousarray(ackley.y_grid, dtype=np.float64)

    knap = bench.make_knapsack()
    knap_base = np.ascontiguousarray(knap.y_grid, dtype=np.float64)

    workloads = [
        (
            "ascend_grid (60x60 grid, 16 restarts x 500 steps)",
            "ascend_grid",
            lambda rep: (
                grid_base, dims, np.sqrt(2e-2), 16, 500, 1,
                np.random.default_rng(rep),
            ),
        ),
        (
            "anneal_codes (d=10 knapsack, 16 chains x 2000 steps)",
            "anneal_codes",
            lambda rep: (
                knap_base, knap.space.codes, knap.space.code_to_index,
                knap.space.dim, np.sqrt(2e-2), 16, 2000, 1.0, 0.995,
                np.random.default_rng(rep),
            ),
        ),
    ]

    print(f"{'workload':<52} {'native':>10} {'python':>10} {'speedup':>8}")
    for label, fn_name, args_fn in workloads:
        t_native, r_native = time_calls(getattr(native, fn_name), args_fn, args.repeats)
        t_python, r_python = time_calls(getattr(python, fn_name), args_fn, args.repeats)
        if r_native != r_python:
            raise SystemExit(f"backend results diverge on {label}: "
                             f"{r_native} vs {r_python}")
        print(
            f"{label:<52} {t_native * 1e3:>8.2f}ms {t_python * 1e3:>8.2f}ms "
            f"{t_python / t_native:>7.1f}x"
        )


if __name__ == "__main__":
    main()
