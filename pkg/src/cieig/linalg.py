"""Shared linear-algebra primitives.

Dense blocks are plain (n, k) complex128 ndarrays.  Sparse LU of the shifted
pencil delegates to SuperLU (scipy.sparse.linalg.splu) with a fill-reducing
preorder; the factorization object is read-only after creation and safe to
share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from .errors import (
    DimensionError,
    IndefiniteBError,
    RankZeroError,
    SingularShiftError,
)
from .sparse import MatrixPencil

# near-singular pivot threshold, relative to the largest stored entry
_PIVOT_REL_TOL = 1e-14


def as_block(x) -> np.ndarray:
    b = np.asarray(x, dtype=np.complex128)
    if b.ndim == 1:
        b = b[:, None]
    if b.ndim != 2:
        raise DimensionError("block must be 2-D")
    return b


@dataclass
class ShiftedFactorization:
    """LU factors of (zB - A) for one quadrature shift."""

    shift: complex
    n: int
    _lu: object = field(repr=False)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        rhs = as_block(rhs)
        if rhs.shape[0] != self.n:
            raise DimensionError(f"rhs rows {rhs.shape[0]} != n {self.n}")
        if rhs.shape[1] == 0:
            return rhs.copy()
        return self._lu.solve(rhs)


def shifted_factorize(pencil: MatrixPencil, z: complex) -> ShiftedFactorization:
    """Factor (zB - A), suitable for repeated multi-RHS solves.

    Raises SingularShiftError when z hits (or nearly hits) an eigenvalue,
    detected via an exact pivot breakdown or a tiny U pivot.
    """
    z = complex(z)
    m = (z * pencil.b.to_scipy() - pencil.a.to_scipy()).tocsc()
    scale = max(np.abs(m.data).max() if m.nnz else 0.0, 1e-300)
    try:
        lu = spla.splu(m)
    except RuntimeError as exc:  # "Factor is exactly singular"
        raise SingularShiftError(z) from exc
    pivots = np.abs(lu.U.diagonal())
    if pivots.size == 0 or pivots.min() < _PIVOT_REL_TOL * scale:
        raise SingularShiftError(z)
    return ShiftedFactorization(shift=z, n=pencil.n, _lu=lu)


def solve_block(f: ShiftedFactorization, rhs) -> np.ndarray:
    """Solve (zB - A) y = rhs column-wise."""
    return f.solve(rhs)


def orthonormalize(block, drop_tol: float = 1e-10) -> np.ndarray:
    """Orthonormalize columns by modified Gram-Schmidt with reorthogonalization.

    Columns whose norm after orthogonalization falls below drop_tol times
    their original norm are dropped.  Raises RankZeroError when nothing
    survives.
    """
    b = as_block(block).copy()
    if b.shape[1] == 0:
        raise RankZeroError("empty block")
    kept: list[np.ndarray] = []
    for j in range(b.shape[1]):
        v = b[:, j]
        orig = np.linalg.norm(v)
        if orig == 0.0:
            continue
        for _ in range(2):  # two MGS passes for 1e-12 Gram accuracy
            for q in kept:
                v = v - q * (q.conj() @ v)
        nrm = np.linalg.norm(v)
        if nrm <= drop_tol * orig:
            continue
        kept.append(v / nrm)
    if not kept:
        raise RankZeroError("all columns dropped")
    return np.column_stack(kept)


def rank_truncate_svd(block, rel_tol: float = 1e-12) -> np.ndarray:
    """Orthonormal basis of the dominant singular subspace.

    Keeps left singular vectors with sigma_i >= rel_tol * sigma_max.
    """
    b = as_block(block)
    if b.shape[1] == 0:
        raise RankZeroError("empty block")
    u, s, _ = np.linalg.svd(b, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        raise RankZeroError("zero block")
    r = int(np.count_nonzero(s >= rel_tol * s[0]))
    return u[:, :r]


def dense_hermitian_gep(a_small, b_small):
    """All eigenpairs of the small dense Hermitian-definite pencil.

    Cholesky-reduces b to a standard Hermitian problem, then diagonalizes
    (LAPACK's shifted-QR path via scipy.linalg.eigh).  Eigenvectors are
    b-orthonormal; eigenvalues ascend.
    """
    a = np.asarray(a_small, dtype=np.complex128)
    b = np.asarray(b_small, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise DimensionError("operands must be square and equally sized")
    if a.size and np.abs(a.imag).max() == 0.0 and np.abs(b.imag).max() == 0.0:
        a, b = a.real.copy(), b.real.copy()  # real path is ~2x faster in LAPACK
    if a.shape[0] > 4096:
        raise DimensionError("dense GEP capped at 4096")
    try:
        np.linalg.cholesky(b)
    except np.linalg.LinAlgError as exc:
        raise IndefiniteBError("projected B is not positive definite") from exc
    try:
        w, v = sla.eigh(a, b)
    except sla.LinAlgError as exc:
        raise IndefiniteBError(str(exc)) from exc
    return w, v
