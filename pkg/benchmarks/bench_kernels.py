"""Time the compiled decode kernels against the pure-numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--trials N] [--repeats R]
"""

import argparse
import time

import numpy as np

from onebit import kernels


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=5_000_000)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    n, m = args.trials, 16
    h = np.ascontiguousarray(rng.integers(0, m, n))
    r = rng.random(n)
    q1, v0, v1 = rng.random(m), rng.random(m) - 0.5, rng.random(m) + 0.5
    u = rng.random(n)

    rows = []
    for name, np_fn, nb_fn in [
        ("decode_table",
         lambda: kernels._decode_table_np(h, r, q1, v0, v1),
         (lambda: kernels._decode_table_nb(h, r, q1, v0, v1)) if kernels.HAVE_NUMBA else None),
        ("threshold_affine",
         lambda: kernels._threshold_affine_np(u, 0.37, 0.6, -0.2, 0.4, 0.0, 1.0),
         (lambda: kernels._threshold_affine_nb(u, 0.37, 0.6, -0.2, 0.4, 0.0, 1.0)) if kernels.HAVE_NUMBA else None),
    ]:
        t_np = best_of(np_fn, args.repeats)
        if nb_fn is None:
            rows.append((name, t_np, None))
            continue
        nb_fn()  # warm up the compile cache before timing
        t_nb = best_of(nb_fn, args.repeats)
        rows.append((name, t_np, t_nb))

    print(f"n = {n:,} samples, best of {args.repeats}")
    for name, t_np, t_nb in rows:
        if t_nb is None:
            print(f"{name:18s} numpy {t_np * 1e3:8.2f} ms   (numba unavailable)")
        else:
            print(f"{name:18s} numpy {t_np * 1e3:8.2f} ms   "
                  f"numba {t_nb * 1e3:8.2f} ms   speedup {t_np / t_nb:5.2f}x")


if __name__ == "__main__":
    main()
