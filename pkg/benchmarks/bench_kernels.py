"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

Compilation is excluded: every numba kernel is called once before timing.
Results from both paths are compared before timing starts.
"""

import argparse
import time

import numpy as np

from submp import _kernels as K
from submp.relaxation import simplex_grid


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(rng):
    n = 16
    masks = np.arange(1 << n, dtype=np.uint64)
    em = np.array([int(rng.integers(1, 1 << n)) for _ in range(40)], dtype=np.uint64)
    w = rng.uniform(0, 2, size=40)
    yield "cut_values n=16 |E|=40", K.cut_values_np, K.cut_values_nb, (masks, em, w)

    nv, m = 10, 8
    masks = np.arange(1 << (nv + m), dtype=np.uint64)
    em = np.array([int(rng.integers(1, 1 << nv)) for _ in range(m)], dtype=np.uint64)
    aux = np.array([1 << (nv + j) for j in range(m)], dtype=np.uint64)
    w = rng.uniform(0, 2, size=m)
    yield "mc_reduced_values n=18", K.mc_reduced_values_np, K.mc_reduced_values_nb, (masks, em, aux, w)

    k, n = 3, 14
    table = rng.uniform(0, 5, size=1 << n)
    base = np.array([1 << v for v in range(k)], dtype=np.uint64)
    free = np.array([1 << v for v in range(k, n)], dtype=np.uint64)
    yield "brute_force_table k=3 n=14", K.brute_force_table_np, K.brute_force_table_nb, (table, free, base, k)

    n = 12
    bits = (np.arange(1 << n)[:, None] >> np.arange(n)) & 1
    table = np.sqrt(bits @ rng.uniform(0, 1, size=n))  # submodular: no early exit
    yield "submodular_witness n=12", K.submodular_witness_np, K.submodular_witness_nb, (table, n, 1e-9)

    k, m = 4, 30
    pts = simplex_grid(k, m)
    col = rng.uniform(0, 3, size=(k, m + 1, m + 1))
    yield "grid_pair_min k=4 m=30", K.grid_pair_min_np, K.grid_pair_min_nb, (col, pts)


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        raise SystemExit("numba is not installed")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':32s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speedup':>8s}")
    for name, f_np, f_nb, fargs in cases(rng):
        if not same(f_np(*fargs), f_nb(*fargs)):
            raise SystemExit(f"{name}: numpy and numba results differ")
        t_np = best_of(f_np, fargs, args.repeat)
        t_nb = best_of(f_nb, fargs, args.repeat)
        print(f"{name:32s} {1e3 * t_np:12.2f} {1e3 * t_nb:12.2f} {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
