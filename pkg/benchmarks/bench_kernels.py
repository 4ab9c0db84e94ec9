"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5] [--n 10]

The first numba call (compilation) is reported separately and excluded from
the steady-state timings.
"""
import argparse
import time

import numpy as np

from altmark import kernels
from altmark._accel import NUMBA_AVAILABLE
from altmark.prob import _class_arrays


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n, trials, length, rows):
    rng = np.random.default_rng(0)
    cdf = np.cumsum(np.full(8, 1 / 8))
    cdf[-1] = 1.0
    U = rng.random((trials, length))
    v = rng.integers(0, 64, 1_000_000)
    parts, k = (3, 2, 2, 1, 1), 1
    u, c = _class_arrays(parts, k)
    nxt, fac = kernels.class_state_tables(c)
    P = rng.dirichlet(np.ones(len(parts) + 2), size=rows)
    return {
        f"class_histogram(n={n})": lambda impl: impl.class_histogram(n),
        f"runs_from_uniforms({trials}x{length})": lambda impl: impl.runs_from_uniforms(U, cdf),
        "bigram_counts(1e6, m=64)": lambda impl: impl.bigram_counts(v, 64),
        f"alt_class_value_grad({rows} rows)": lambda impl: impl.alt_class_value_grad(P, u, k, nxt, fac),
    }


class Impl:
    def __init__(self, suffix):
        for name in ("class_histogram", "runs_from_uniforms", "bigram_counts", "alt_class_value_grad"):
            setattr(self, name, getattr(kernels, f"{name}_{suffix}"))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=10, help="pattern length for the histogram kernel")
    ap.add_argument("--trials", type=int, default=256)
    ap.add_argument("--length", type=int, default=10_000)
    ap.add_argument("--rows", type=int, default=64, help="simplex points per value/gradient call")
    args = ap.parse_args(argv)

    table = cases(args.n, args.trials, args.length, args.rows)
    numpy_impl = Impl("numpy")
    numba_impl = Impl("numba") if NUMBA_AVAILABLE else None
    if numba_impl is None:
        print("numba not installed: timing the numpy path only")

    print(f"{'kernel':<34}{'numpy s':>10}{'numba s':>10}{'compile s':>11}{'speedup':>9}")
    for name, call in table.items():
        t_np = best_of(lambda: call(numpy_impl), args.repeat)
        if numba_impl is None:
            print(f"{name:<34}{t_np:>10.4f}{'-':>10}{'-':>11}{'-':>9}")
            continue
        t0 = time.perf_counter()
        call(numba_impl)
        first = time.perf_counter() - t0
        t_nb = best_of(lambda: call(numba_impl), args.repeat)
        print(f"{name:<34}{t_np:>10.4f}{t_nb:>10.4f}{first:>11.3f}{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
