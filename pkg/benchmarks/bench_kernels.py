"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--depths 6 10 14] [--repeat 5]

Both kernel modules are imported directly, so the CKTHERMO_DISABLE_NUMBA
flag is irrelevant here.  The numba functions are called once before timing
so compilation is excluded.
"""
import argparse
import math
import timeit

import numpy as np

from ckthermo import LocallyConstantPotential, ZeroOneMatrix, build_transfer_matrix, phi_beta
from ckthermo import _numba_kernels as nbk
from ckthermo import _numpy_kernels as npk


def make_matrix(depth):
    A = ZeroOneMatrix.from_rows(["111", "110", "011"])
    H = LocallyConstantPotential(A, 2, np.linspace(1.5, 3.5, 7))
    return build_transfer_matrix(A, phi_beta(H, 0.6), depth)


def cases(M):
    args = (M.indptr, M.indices, M.data)
    x = np.random.default_rng(0).random(M.size)
    n = M.size
    return {
        "matvec": lambda k: k.csr_matvec(*args, x),
        "rmatvec": lambda k: k.csr_rmatvec(*args, x),
        "perron": lambda k: k.power_loop(*args, np.ones(n), np.full(n, 1.0 / n), 1e-12, 100_000),
        "log_norms(60)": lambda k: k.iterate_log_norms(*args, 60),
    }


def best_of(fn, repeat):
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--depths", type=int, nargs="+", default=[6, 10, 14])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)

    for fn in cases(make_matrix(2)).values():
        fn(nbk)  # compile

    print(f"{'depth':>5} {'cylinders':>9} {'kernel':<14} {'numba':>11} {'numpy':>11} {'speedup':>8}")
    for depth in args.depths:
        M = make_matrix(depth)
        for name, fn in cases(M).items():
            t_nb = best_of(lambda: fn(nbk), args.repeat)
            t_np = best_of(lambda: fn(npk), args.repeat)
            print(f"{depth:>5} {M.size:>9} {name:<14} {t_nb * 1e3:>9.3f}ms {t_np * 1e3:>9.3f}ms "
                  f"{t_np / t_nb if t_nb else math.inf:>7.1f}x")


if __name__ == "__main__":
    main()
