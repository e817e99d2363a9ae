"""Time the compiled core against the numpy fallback on the hot kernels.

Usage: python3 benchmarks/bench_backends.py [--repeat 3]
"""
import argparse
import timeit

import numpy as np

from krigbound import _fallback

try:
    from krigbound import _core
except ImportError:
    _core = None


def cases():
    rng = np.random.default_rng(0)
    a = rng.random((600, 2))
    grid = rng.random((2000, 2))
    z = np.logspace(-3, 1.5, 200_000)
    n, d, steps = 60, 2, 10 * 60 * 60
    ranks = np.column_stack([rng.permutation(n) for _ in range(d)]).astype(np.int64)
    cols = rng.integers(0, d, steps)
    ia = rng.integers(0, n, steps)
    ib = rng.integers(0, n, steps)
    return {
        "bessel_k 2e5 points": lambda m: m.bessel_k(2.3, z),
        "matern_gram 600x600": lambda m: m.matern_gram(a, 2.5, 1.0),
        "matern_matrix 600x2000": lambda m: m.matern_matrix(a, grid, 3.5, 1.0),
        "gaussian_matrix 600x2000": lambda m: m.gaussian_matrix(a, grid, 1.0),
        "nearest_distance 2000x600": lambda m: m.nearest_distance(grid, a),
        "maximin_search n=60, 36000 swaps": lambda m: m.maximin_search(ranks.copy(), cols, ia, ib),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if _core is None:
        print("compiled core not built; only the fallback is timed")
    print(f"{'case':36s} {'fallback s':>11s} {'compiled s':>11s} {'speedup':>8s}")
    for name, fn in cases().items():
        slow = min(timeit.repeat(lambda: fn(_fallback), number=1, repeat=args.repeat))
        if _core is None:
            print(f"{name:36s} {slow:11.4f}")
            continue
        fast = min(timeit.repeat(lambda: fn(_core), number=1, repeat=args.repeat))
        print(f"{name:36s} {slow:11.4f} {fast:11.4f} {slow / fast:7.1f}x")


if __name__ == "__main__":
    main()
