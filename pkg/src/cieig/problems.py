"""FEM problem generators, ground-truth oracle, and dataset I/O.

All three generators discretize the unit square with P1 triangles on a
uniform grid (each cell split into two right triangles), homogeneous
Dirichlet boundary.  Spatially varying coefficients come from a log-normal
Gaussian random field sampled spectrally.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import (
    DimensionError,
    FormatError,
    IndefiniteBError,
    OracleCapError,
    ParameterError,
)
from .linalg import dense_hermitian_gep
from .sparse import MatrixPencil, SparseMatrix, read_matrix_market, write_matrix_market

ORACLE_CAP = 2500


@dataclass(frozen=True)
class Grid2D:
    """Interior-node counts of a uniform grid on the unit square."""

    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ParameterError("grid needs at least 2 interior nodes per axis")

    @property
    def hx(self) -> float:
        return 1.0 / (self.nx + 1)

    @property
    def hy(self) -> float:
        return 1.0 / (self.ny + 1)

    @property
    def h(self) -> float:
        if self.nx != self.ny:
            raise ParameterError("h is defined for square grids only")
        return self.hx

    @property
    def n(self) -> int:
        return self.nx * self.ny


@dataclass(frozen=True)
class CoefficientField:
    """Nodal samples (interior nodes, row-major y-then-x) of a positive field."""

    grid: Grid2D
    values: np.ndarray
    mean: float
    variance: float
    length_scale: float
    seed: int

    def __post_init__(self):
        if self.values.shape != (self.grid.n,):
            raise DimensionError("values length must be nx*ny")
        if np.any(self.values <= 0):
            raise ParameterError("coefficient values must be positive")

    def as_grid(self) -> np.ndarray:
        return self.values.reshape(self.grid.ny, self.grid.nx)


@dataclass(frozen=True)
class GroundTruth:
    """The m smallest-magnitude eigenvalues, ascending."""

    eigenvalues: np.ndarray
    m: int
    method: str = "dense-oracle"
    residual_bound: float = 1e-10

    def __post_init__(self):
        if len(self.eigenvalues) != self.m:
            raise DimensionError("eigenvalue count must equal m")
        if np.any(np.diff(self.eigenvalues) < 0):
            raise ParameterError("eigenvalues must ascend")


def grf_sample(grid: Grid2D, mean: float, variance: float, length_scale: float,
               seed: int) -> CoefficientField:
    """Log-normal stationary random field with squared-exponential covariance.

    log(field) has mean log(mean) and pointwise variance `variance`; sampled
    by frequency-domain synthesis on a 2x padded periodic grid to suppress
    wrap-around correlation.  Deterministic per seed.
    """
    if mean <= 0 or length_scale <= 0:
        raise ParameterError("mean and length_scale must be positive")
    if variance < 0:
        raise ParameterError("variance must be non-negative")
    if variance == 0.0:
        vals = np.full(grid.n, float(mean))
        return CoefficientField(grid, vals, mean, variance, length_scale, seed)

    rng = np.random.default_rng(seed)
    npx, npy = 2 * (grid.nx + 1), 2 * (grid.ny + 1)
    kx = 2.0 * np.pi * np.fft.fftfreq(npx, d=grid.hx)
    ky = 2.0 * np.pi * np.fft.fftfreq(npy, d=grid.hy)
    k2 = kx[None, :] ** 2 + ky[:, None] ** 2
    # squared-exponential spectral density, normalized below
    amp = np.exp(-0.25 * length_scale**2 * k2)
    noise = rng.standard_normal((npy, npx)) + 1j * rng.standard_normal((npy, npx))
    g = np.real(np.fft.ifft2(noise * amp))
    # exact pointwise unit variance: Var[Re ifft2] = sum(amp^2) / N^2 / N^2 * N^2
    g *= np.sqrt(variance) * (npx * npy) / np.linalg.norm(amp)
    g = g[1:grid.ny + 1, 1:grid.nx + 1]
    vals = mean * np.exp(g).ravel()
    return CoefficientField(grid, vals, mean, variance, length_scale, seed)


# ---------------------------------------------------------------------------
# P1 assembly machinery


def _node_index(grid: Grid2D) -> np.ndarray:
    """Full-grid node numbering: -1 on the Dirichlet boundary."""
    full = -np.ones((grid.ny + 2, grid.nx + 2), dtype=np.int64)
    full[1:-1, 1:-1] = np.arange(grid.n).reshape(grid.ny, grid.nx)
    return full

def _extend_field(field: CoefficientField) -> np.ndarray:
    """Nodal values on the full grid, boundary filled by edge replication."""
    inner = field.as_grid()
    return np.pad(inner, 1, mode="edge")


def _triangles(grid: Grid2D):
    """Vertex index triples (full-grid flat indices) of all 2*(nx+1)*(ny+1) elements."""
    nxf, nyf = grid.nx + 2, grid.ny + 2
    ii, jj = np.meshgrid(np.arange(nyf - 1), np.arange(nxf - 1), indexing="ij")
    p00 = (ii * nxf + jj).ravel()
    p10 = p00 + 1
    p01 = p00 + nxf
    p11 = p01 + 1
    # lower-right and upper-left right triangles per cell
    t1 = np.stack([p00, p10, p11], axis=1)
    t2 = np.stack([p00, p11, p01], axis=1)
    return np.concatenate([t1, t2], axis=0)


def _element_matrices(grid: Grid2D):
    """Unit-coefficient stiffness and mass element matrices for both triangle
    orientations (they coincide up to vertex ordering on this mesh)."""
    hx, hy = grid.hx, grid.hy
    area = 0.5 * hx * hy

    def tri_mats(pts):
        x, y = pts[:, 0], pts[:, 1]
        bmat = np.array([y[1] - y[2], y[2] - y[0], y[0] - y[1]])
        cmat = np.array([x[2] - x[1], x[0] - x[2], x[1] - x[0]])
        k = (np.outer(bmat, bmat) + np.outer(cmat, cmat)) / (4.0 * area)
        m = area / 12.0 * (np.ones((3, 3)) + np.eye(3))
        return k, m

    tri1 = np.array([[0.0, 0.0], [hx, 0.0], [hx, hy]])
    tri2 = np.array([[0.0, 0.0], [hx, hy], [0.0, hy]])
    return tri_mats(tri1), tri_mats(tri2)


def _assemble(grid: Grid2D, coef_stiff: np.ndarray, coef_mass: np.ndarray):
    """Assemble interior-node stiffness K and mass M with per-element
    midpoint-evaluated coefficients."""
    tris = _triangles(grid)
    half = tris.shape[0] // 2
    (k1, m1), (k2, m2) = _element_matrices(grid)
    ks = np.concatenate([np.broadcast_to(k1, (half, 3, 3)),
                         np.broadcast_to(k2, (half, 3, 3))])
    ms = np.concatenate([np.broadcast_to(m1, (half, 3, 3)),
                         np.broadcast_to(m2, (half, 3, 3))])
    cs = coef_stiff[tris].mean(axis=1)  # centroid value of P1 interpolant
    cm = coef_mass[tris].mean(axis=1)

    node_map = _node_index(grid).ravel()
    dof = node_map[tris]  # (ne, 3), -1 for boundary vertices
    rows = np.repeat(dof, 3, axis=1).ravel()
    cols = np.tile(dof, (1, 3)).ravel()
    kvals = (ks * cs[:, None, None]).ravel()
    mvals = (ms * cm[:, None, None]).ravel()
    keep = (rows >= 0) & (cols >= 0)
    n = grid.n
    kmat = sp.coo_matrix((kvals[keep], (rows[keep], cols[keep])), shape=(n, n))
    mmat = sp.coo_matrix((mvals[keep], (rows[keep], cols[keep])), shape=(n, n))
    return kmat.tocsr(), mmat.tocsr()


def assemble_thermal(field_k: CoefficientField, c: float) -> MatrixPencil:
    """Heat-equation decay-rate pencil K u = lambda C u."""
    if c <= 0:
        raise ParameterError("heat capacity must be positive")
    grid = field_k.grid
    coef = _extend_field(field_k).ravel()
    ones = np.ones_like(coef)
    kmat, cmat = _assemble(grid, coef, c * ones)
    return MatrixPencil(
        a=SparseMatrix.from_scipy(kmat),
        b=SparseMatrix.from_scipy(cmat),
        hermitian=True,
        b_positive_definite=True,
        problem_id=f"thermal-{grid.nx}x{grid.ny}-s{field_k.seed}",
    )


def assemble_em_cavity(field_eps: CoefficientField, mu: float) -> MatrixPencil:
    """TE cavity mode pencil A u = omega^2 M u."""
    if mu <= 0:
        raise ParameterError("permeability must be positive")
    grid = field_eps.grid
    eps = _extend_field(field_eps).ravel()
    inv_mu = np.full_like(eps, 1.0 / mu)
    amat, mmat = _assemble(grid, inv_mu, eps)
    return MatrixPencil(
        a=SparseMatrix.from_scipy(amat),
        b=SparseMatrix.from_scipy(mmat),
        hermitian=True,
        b_positive_definite=True,
        problem_id=f"em-{grid.nx}x{grid.ny}-s{field_eps.seed}",
    )


def assemble_plate(field_rho: CoefficientField, bending_d: float,
                   thickness_h: float) -> MatrixPencil:
    """Biharmonic plate pencil via lumped-mass Schur condensation.

    A = D * K M_L^{-1} K with M_L the row-sum-lumped unit mass matrix;
    B is the consistent mass weighted by rho(x) * h.  Eigenvalue is omega^2.
    """
    if bending_d <= 0 or thickness_h <= 0:
        raise ParameterError("bending rigidity and thickness must be positive")
    grid = field_rho.grid
    rho = _extend_field(field_rho).ravel()
    ones = np.ones_like(rho)
    kmat, m_unit = _assemble(grid, ones, ones)
    _, m_rho = _assemble(grid, ones, rho * thickness_h)
    ml_inv = sp.diags(1.0 / np.asarray(m_unit.sum(axis=1)).ravel())
    amat = bending_d * (kmat @ ml_inv @ kmat)
    amat = (amat + amat.T) * 0.5  # exact symmetry despite fp roundoff
    return MatrixPencil(
        a=SparseMatrix.from_scipy(amat.tocsr()),
        b=SparseMatrix.from_scipy(m_rho),
        hermitian=True,
        b_positive_definite=True,
        problem_id=f"plate-{grid.nx}x{grid.ny}-s{field_rho.seed}",
    )


def dense_ground_truth(pencil: MatrixPencil, m: int) -> GroundTruth:
    """Dense-solve oracle: the m smallest-magnitude eigenvalues, ascending."""
    if pencil.n > ORACLE_CAP:
        raise OracleCapError(f"n={pencil.n} exceeds oracle cap {ORACLE_CAP}")
    if not pencil.hermitian:
        raise ParameterError("oracle requires a Hermitian pencil")
    if m < 1 or m > pencil.n:
        raise ParameterError("m out of range")
    a = pencil.a.to_dense()
    b = pencil.b.to_dense()
    if np.abs(a.imag).max() < 1e-300 and np.abs(b.imag).max() < 1e-300:
        a, b = a.real, b.real
    w, _ = dense_hermitian_gep(a, b)
    order = np.argsort(np.abs(w), kind="stable")[:m]
    eigs = np.sort(w[order])
    return GroundTruth(eigenvalues=eigs, m=m)


def target_count(n: int) -> int:
    """Benchmark target count: 1% of the dimension, at least 4."""
    return max(4, round(0.01 * n))


# ---------------------------------------------------------------------------
# dataset I/O: A.mtx + B.mtx + meta.json


def write_dataset(path, pencil: MatrixPencil, field: CoefficientField,
                  truth: GroundTruth | None = None) -> None:
    os.makedirs(path, exist_ok=True)
    write_matrix_market(os.path.join(path, "A.mtx"), pencil.a)
    write_matrix_market(os.path.join(path, "B.mtx"), pencil.b)
    meta = {
        "problem_id": pencil.problem_id,
        "grid": {"nx": field.grid.nx, "ny": field.grid.ny},
        "field": {
            "mean": field.mean,
            "variance": field.variance,
            "length_scale": field.length_scale,
            "seed": field.seed,
            "values": field.values.tolist(),
        },
        "truth": None if truth is None else {
            "m": truth.m,
            "eigenvalues": truth.eigenvalues.tolist(),
        },
    }
    with open(os.path.join(path, "meta.json"), "w") as fh:
        json.dump(meta, fh)


def read_dataset(path):
    """Returns (pencil, field, truth-or-None)."""
    a_path = os.path.join(path, "A.mtx")
    b_path = os.path.join(path, "B.mtx")
    meta_path = os.path.join(path, "meta.json")
    for p in (a_path, b_path, meta_path):
        if not os.path.exists(p):
            raise FormatError(f"missing dataset file {os.path.basename(p)}")
    a = read_matrix_market(a_path)
    b = read_matrix_market(b_path)
    try:
        with open(meta_path) as fh:
            meta = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"bad meta.json: {exc.msg}", line=exc.lineno) from exc
    try:
        grid = Grid2D(int(meta["grid"]["nx"]), int(meta["grid"]["ny"]))
        fm = meta["field"]
        field = CoefficientField(
            grid=grid,
            values=np.asarray(fm["values"], dtype=float),
            mean=float(fm["mean"]),
            variance=float(fm["variance"]),
            length_scale=float(fm["length_scale"]),
            seed=int(fm["seed"]),
        )
        problem_id = str(meta["problem_id"])
    except (KeyError, TypeError) as exc:
        raise FormatError(f"meta.json missing key: {exc}") from exc
    truth = None
    if meta.get("truth") is not None:
        truth = GroundTruth(
            eigenvalues=np.asarray(meta["truth"]["eigenvalues"], dtype=float),
            m=int(meta["truth"]["m"]),
        )
    pencil = MatrixPencil(a=a, b=b, hermitian=True, b_positive_definite=True,
                          problem_id=problem_id)
    return pencil, field, truth
