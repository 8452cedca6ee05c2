"""Timing comparison of the compiled kernels against the numpy fallbacks.

Run twice to compare:

    python3 benchmarks/kernel_bench.py
    CIEIG_DISABLE_NUMBA=1 python3 benchmarks/kernel_bench.py
"""

import time

import numpy as np

from cieig import kernels
from cieig.problems import Grid2D, assemble_thermal, grf_sample


def bench(fn, *args, repeats=20):
    fn(*args)  # warm-up (triggers JIT when enabled)
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - t0) / repeats


def main():
    mode = "numba" if kernels.NUMBA_ENABLED else "numpy"
    print(f"kernel backend: {mode}")

    grid = Grid2D(50, 50)
    fld = grf_sample(grid, 1.0, 0.1, 0.2, seed=0)
    a = assemble_thermal(fld, 1.0).a
    v = np.random.default_rng(0).standard_normal(a.n_cols)
    t = bench(kernels.csr_matvec, a.values, a.col_indices, a.row_offsets, v)
    print(f"csr_matvec   n={a.n_rows:5d} nnz={len(a.values):6d}: "
          f"{t * 1e6:8.1f} us")

    rng = np.random.default_rng(1)
    ts = np.linspace(0.0, 1.0, 2048)
    eigs = np.sort(rng.uniform(0.0, 1.0, 500))
    t = bench(kernels.kde_eval, ts, eigs, 10.0)
    print(f"kde_eval     pts=2048 eigs=500:      {t * 1e6:8.1f} us")


if __name__ == "__main__":
    main()
