"""Benchmark the numba kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeats N]

Times the three hot kernels on representative sizes and prints a table
with the speedup of the numba build over the numpy fallback. The same
comparison can be forced at package level with GCQ_BACKEND=numpy|numba.
"""

import argparse
import time

import numpy as np

from gcq._backend import load_backend


def bench(fn, repeats):
    fn()  # warmup / JIT
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def random_coeffs(m, d, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((m, d, d)) + 1j * rng.standard_normal((m, d, d))
    return a / np.sqrt(np.sum(np.abs(a) ** 2))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    knp, _ = load_backend("numpy")
    try:
        knb, _ = load_backend("numba")
    except ImportError:
        print("numba unavailable; nothing to compare")
        return

    rows = []

    for d, m in ((2, 4), (3, 9), (4, 8), (4, 16)):
        coeffs = random_coeffs(m, d, seed=d * 10 + m)
        t_np = bench(lambda: knp.build_tau(coeffs), args.repeats)
        t_nb = bench(lambda: knb.build_tau(coeffs), args.repeats)
        rows.append((f"build_tau d={d} m={m}", t_np, t_nb))

    for d, m, m2 in ((3, 9, 9), (4, 8, 8)):
        coeffs = random_coeffs(m, d, seed=7)
        tensor = knp.build_tau(coeffs)
        rng = np.random.default_rng(1)
        rows_v = rng.standard_normal((m2, m)) + 1j * rng.standard_normal((m2, m))

        def loop_np():
            for _ in range(100):
                knp.diag_and_pregrad(tensor, rows_v)

        def loop_nb():
            for _ in range(100):
                knb.diag_and_pregrad(tensor, rows_v)

        t_np = bench(loop_np, args.repeats)
        t_nb = bench(loop_nb, args.repeats)
        rows.append((f"diag_and_pregrad x100 d={d} m={m}", t_np, t_nb))

    for d, n, m2 in ((2, 4, 4), (4, 4, 16)):
        amps = random_coeffs(n, d, seed=3)
        rng = np.random.default_rng(2)
        w = rng.standard_normal((m2, n)) + 1j * rng.standard_normal((m2, n))

        def loop_np():
            for _ in range(200):
                knp.avg_g_terms(amps, w)

        def loop_nb():
            for _ in range(200):
                knb.avg_g_terms(amps, w)

        t_np = bench(loop_np, args.repeats)
        t_nb = bench(loop_nb, args.repeats)
        rows.append((f"avg_g_terms x200 d={d} m'={m2}", t_np, t_nb))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}")
    for name, t_np, t_nb in rows:
        print(f"{name:<{width}}  {t_np * 1e3:>8.3f}ms  {t_nb * 1e3:>8.3f}ms  "
              f"{t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
