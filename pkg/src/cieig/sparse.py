"""Sparse matrix storage (CSR), the matrix pencil, and Matrix Market I/O."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError, FormatError
from .kernels import csr_matvec


@dataclass(frozen=True)
class SparseMatrix:
    """Compressed-sparse-row matrix with complex values.

    Purely real matrices store zero imaginary parts.  Rows hold strictly
    increasing column indices and no duplicate entries.
    """

    n_rows: int
    n_cols: int
    row_offsets: np.ndarray  # int64, length n_rows+1
    col_indices: np.ndarray  # int64
    values: np.ndarray  # complex128

    def __post_init__(self):
        ro, ci, vals = self.row_offsets, self.col_indices, self.values
        if ro.shape != (self.n_rows + 1,):
            raise DimensionError("row_offsets length must be n_rows+1")
        if ro[0] != 0 or ro[-1] != len(vals) or np.any(np.diff(ro) < 0):
            raise DimensionError("row_offsets must be non-decreasing from 0 to nnz")
        if len(ci) != len(vals):
            raise DimensionError("col_indices and values length mismatch")
        if len(ci) and (ci.min() < 0 or ci.max() >= self.n_cols):
            raise DimensionError("column index out of range")
        if len(ci) > 1:
            d = np.diff(ci)
            row_start = np.zeros(len(ci), dtype=bool)
            row_start[np.clip(ro[1:-1], 0, len(ci) - 1)] = True
            if np.any((d <= 0) & ~row_start[1:]):
                raise DimensionError("columns not strictly increasing within a row")

    @property
    def nnz(self) -> int:
        return len(self.values)

    @classmethod
    def from_scipy(cls, m) -> "SparseMatrix":
        csr = sp.csr_matrix(m, dtype=np.complex128)
        csr.sum_duplicates()
        csr.sort_indices()
        csr.eliminate_zeros()
        return cls(
            n_rows=csr.shape[0],
            n_cols=csr.shape[1],
            row_offsets=csr.indptr.astype(np.int64),
            col_indices=csr.indices.astype(np.int64),
            values=csr.data.astype(np.complex128),
        )

    @classmethod
    def from_dense(cls, a) -> "SparseMatrix":
        return cls.from_scipy(sp.csr_matrix(np.asarray(a, dtype=np.complex128)))

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls.from_scipy(sp.eye(n, format="csr", dtype=np.complex128))

    def to_scipy(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.values, self.col_indices, self.row_offsets),
            shape=(self.n_rows, self.n_cols),
        )

    def to_dense(self) -> np.ndarray:
        return self.to_scipy().toarray()

    def conj_transpose(self) -> "SparseMatrix":
        return SparseMatrix.from_scipy(self.to_scipy().conj().T.tocsr())

    def is_hermitian(self, rel_tol: float = 1e-12) -> bool:
        m = self.to_scipy()
        diff = abs(m - m.conj().T)
        scale = max(abs(m).max() if m.nnz else 0.0, 1e-300)
        return (diff.max() if diff.nnz else 0.0) <= rel_tol * scale


def sparse_matvec(m: SparseMatrix, v) -> np.ndarray:
    """Return m @ v, computed exactly from the stored entries."""
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (m.n_cols,):
        raise DimensionError(f"vector length {v.shape} != n_cols {m.n_cols}")
    return csr_matvec(m.values, m.col_indices, m.row_offsets, v)


def sparse_matmat(m: SparseMatrix, block: np.ndarray) -> np.ndarray:
    """Return m @ block for a dense block of column vectors."""
    block = np.asarray(block, dtype=np.complex128)
    if block.ndim != 2 or block.shape[0] != m.n_cols:
        raise DimensionError("block rows must equal n_cols")
    return m.to_scipy() @ block


@dataclass(frozen=True)
class MatrixPencil:
    """The pair (A, B) of the generalized eigenvalue problem A x = lambda B x."""

    a: SparseMatrix
    b: SparseMatrix
    hermitian: bool = False
    b_positive_definite: bool = False
    problem_id: str = ""

    def __post_init__(self):
        if self.a.n_rows != self.a.n_cols or self.b.n_rows != self.b.n_cols:
            raise DimensionError("pencil matrices must be square")
        if self.a.n_rows != self.b.n_rows:
            raise DimensionError("A and B dimensions differ")
        if self.hermitian:
            if not (self.a.is_hermitian() and self.b.is_hermitian()):
                raise DimensionError("hermitian flag set but A or B is not Hermitian")

    @property
    def n(self) -> int:
        return self.a.n_rows


# ---------------------------------------------------------------------------
# Matrix Market coordinate format

_FIELDS = ("real", "complex", "integer")
_SYMMETRIES = ("general", "symmetric", "hermitian", "skew-symmetric")


def write_matrix_market(path, m: SparseMatrix, field: str = "complex") -> None:
    """Write in 1-based coordinate format, general symmetry, full precision."""
    if field not in ("real", "complex"):
        raise FormatError(f"unsupported field {field!r}")
    coo = m.to_scipy().tocoo()
    with open(path, "w") as fh:
        fh.write(f"%%MatrixMarket matrix coordinate {field} general\n")
        fh.write(f"{m.n_rows} {m.n_cols} {coo.nnz}\n")
        if field == "real":
            for i, j, v in zip(coo.row, coo.col, coo.data):
                fh.write(f"{i + 1} {j + 1} {v.real:.17g}\n")
        else:
            for i, j, v in zip(coo.row, coo.col, coo.data):
                fh.write(f"{i + 1} {j + 1} {v.real:.17g} {v.imag:.17g}\n")


def read_matrix_market(path) -> SparseMatrix:
    """Parse a coordinate-format Matrix Market file.

    Supports real/complex/integer fields and general/symmetric/hermitian
    symmetry.  Raises FormatError carrying the offending line number.
    """
    with open(path) as fh:
        lines = fh.readlines()
    if not lines:
        raise FormatError("empty file", line=1)
    header = lines[0].strip().split()
    if (
        len(header) != 5
        or header[0] != "%%MatrixMarket"
        or header[1].lower() != "matrix"
        or header[2].lower() != "coordinate"
    ):
        raise FormatError("bad Matrix Market header", line=1)
    fmt_field = header[3].lower()
    symmetry = header[4].lower()
    if fmt_field not in _FIELDS:
        raise FormatError(f"unsupported field {fmt_field!r}", line=1)
    if symmetry not in _SYMMETRIES:
        raise FormatError(f"unsupported symmetry {symmetry!r}", line=1)

    idx = 1
    while idx < len(lines) and (lines[idx].startswith("%") or not lines[idx].strip()):
        idx += 1
    if idx >= len(lines):
        raise FormatError("missing size line", line=len(lines))
    try:
        n_rows, n_cols, nnz = (int(tok) for tok in lines[idx].split())
    except ValueError:
        raise FormatError("bad size line", line=idx + 1) from None

    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz, dtype=np.complex128)
    k = 0
    for ln in range(idx + 1, len(lines)):
        raw = lines[ln].strip()
        if not raw or raw.startswith("%"):
            continue
        if k >= nnz:
            raise FormatError("more entries than declared", line=ln + 1)
        toks = raw.split()
        try:
            i = int(toks[0]) - 1
            j = int(toks[1]) - 1
            if fmt_field == "complex":
                v = complex(float(toks[2]), float(toks[3]))
            else:
                v = complex(float(toks[2]), 0.0)
        except (ValueError, IndexError):
            raise FormatError("bad entry line", line=ln + 1) from None
        if not (0 <= i < n_rows and 0 <= j < n_cols):
            raise FormatError("index out of range", line=ln + 1)
        rows[k], cols[k], vals[k] = i, j, v
        k += 1
    if k != nnz:
        raise FormatError(f"expected {nnz} entries, found {k}", line=len(lines))

    if symmetry in ("symmetric", "hermitian", "skew-symmetric"):
        off = rows != cols
        mirror = vals[off]
        if symmetry == "hermitian":
            mirror = np.conj(mirror)
        elif symmetry == "skew-symmetric":
            mirror = -mirror
        mr, mc = cols[off], rows[off]
        rows = np.concatenate([rows, mr])
        cols = np.concatenate([cols, mc])
        vals = np.concatenate([vals, mirror])

    coo = sp.coo_matrix((vals, (rows, cols)), shape=(n_rows, n_cols))
    return SparseMatrix.from_scipy(coo)
