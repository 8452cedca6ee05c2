"""Hot numeric kernels.

Each kernel ships in two flavors: a numba ``@njit`` build and a pure-numpy
fallback.  The fallback is selected by setting the environment variable
``CIEIG_DISABLE_NUMBA=1`` before import (or when numba is unavailable).
``benchmarks/kernel_bench.py`` compares the two paths.
"""

import os

import numpy as np

_DISABLE = os.environ.get("CIEIG_DISABLE_NUMBA", "0") not in ("", "0", "false")

try:
    if _DISABLE:
        raise ImportError
    from numba import njit

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False


def _csr_matvec_numpy(values, col_indices, row_offsets, v):
    n_rows = row_offsets.shape[0] - 1
    out = np.zeros(n_rows, dtype=np.complex128)
    # segment-reduce over rows; add.reduceat mishandles empty rows, so mask
    contrib = values * v[col_indices]
    counts = np.diff(row_offsets)
    nonempty = counts > 0
    if contrib.size:
        sums = np.add.reduceat(contrib, row_offsets[:-1][nonempty])
        out[nonempty] = sums
    return out


def _kde_eval_numpy(ts, eigs, coef):
    # G(t) = sum_j exp(-coef * (t - eig_j)^2), vectorized over ts
    d = ts[:, None] - eigs[None, :]
    return np.exp(-coef * d * d).sum(axis=1)


if NUMBA_ENABLED:

    @njit(cache=True)
    def _csr_matvec_numba(values, col_indices, row_offsets, v):
        n_rows = row_offsets.shape[0] - 1
        out = np.zeros(n_rows, dtype=np.complex128)
        for i in range(n_rows):
            acc = 0.0 + 0.0j
            for k in range(row_offsets[i], row_offsets[i + 1]):
                acc += values[k] * v[col_indices[k]]
            out[i] = acc
        return out

    @njit(cache=True)
    def _kde_eval_numba(ts, eigs, coef):
        out = np.empty(ts.shape[0])
        for i in range(ts.shape[0]):
            acc = 0.0
            t = ts[i]
            for j in range(eigs.shape[0]):
                d = t - eigs[j]
                acc += np.exp(-coef * d * d)
            out[i] = acc
        return out

    csr_matvec = _csr_matvec_numba
    kde_eval = _kde_eval_numba
else:
    csr_matvec = _csr_matvec_numpy
    kde_eval = _kde_eval_numpy
