"""Time the numba and numpy elimination kernels on relation-matrix-shaped input.

    python benchmarks/bench_gf_rank.py [--sizes 50 200 800] [--repeat 5]
"""

import argparse
import time

import numpy as np
from numba import njit

from stratifold import _kernels
from stratifold.generator import random_simply_connected
from stratifold.homology import relation_matrix

rank_gf2_jit = njit(cache=True)(_kernels._rank_gf2_loops)
rref_jit = njit(cache=True)(_kernels._rref_gfp_loops)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def relation_data(blacks, seed=0):
    g, _ = random_simply_connected(seed, blacks)
    return relation_matrix(g, 2).data


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 200, 800])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    # compile outside the timed region
    warm = relation_data(5)
    rank_gf2_jit(_kernels.pack_rows(warm), warm.shape[1])
    rref_jit(warm % 3, 3)

    print(f"{'kernel':<10}{'blacks':>8}{'shape':>14}{'numpy ms':>12}{'numba ms':>12}{'speedup':>9}")
    for n in args.sizes:
        data = relation_data(n)
        shape = f"{data.shape[0]}x{data.shape[1]}"
        packed = _kernels.pack_rows(data)
        t_np, r_np = best_of(lambda: _kernels._rank_gf2_numpy(packed, data.shape[1]), args.repeat)
        t_nb, r_nb = best_of(lambda: rank_gf2_jit(packed, data.shape[1]), args.repeat)
        assert r_np == r_nb
        print(f"{'gf2 rank':<10}{n:>8}{shape:>14}{t_np * 1e3:>12.3f}{t_nb * 1e3:>12.3f}{t_np / t_nb:>9.1f}")
        m3 = np.ascontiguousarray(data % 3)
        t_np, (a, pa) = best_of(lambda: _kernels._rref_gfp_numpy(m3, 3), args.repeat)
        t_nb, (b, pb) = best_of(lambda: rref_jit(m3, 3), args.repeat)
        assert np.array_equal(a, b) and np.array_equal(pa, pb)
        print(f"{'gf3 rref':<10}{n:>8}{shape:>14}{t_np * 1e3:>12.3f}{t_nb * 1e3:>12.3f}{t_np / t_nb:>9.1f}")


if __name__ == "__main__":
    main()
