"""Contour-integral eigensolvers: projector application, CIRR, and FEAST."""

from __future__ import annotations

import json
import struct
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .contours import Contour, QuadratureRule, quadrature_for
from .errors import (
    ConvergenceError,
    DimensionError,
    NoEigenvaluesFound,
    ParameterError,
    RankZeroError,
    SingularShiftError,
)
from .linalg import as_block, dense_hermitian_gep, orthonormalize, rank_truncate_svd, shifted_factorize
from .sparse import MatrixPencil, sparse_matmat


@dataclass
class SolverConfig:
    n_q: int = 32
    source_cols: int | None = None  # default: max(8, 2 * expected_count)
    n_moments: int = 4  # CIRR only
    max_refine: int = 8
    tol: float = 1e-10
    rank_rel_tol: float = 1e-12
    drop_tol: float = 1e-10

    def __post_init__(self):
        if self.n_q < 4 or self.n_moments < 1 or self.max_refine < 1:
            raise ParameterError("counts must be >= 1 (n_q >= 4)")
        if self.tol <= 0:
            raise ParameterError("tol must be positive")

    def cols_for(self, expected_count: int) -> int:
        if self.source_cols is not None:
            return self.source_cols
        return max(8, 2 * expected_count)


@dataclass
class SolveStats:
    n_linear_solves: int = 0
    n_factorizations: int = 0
    iterations: int = 0
    elapsed: float = 0.0

    def to_dict(self) -> dict:
        return {
            "n_linear_solves": self.n_linear_solves,
            "n_factorizations": self.n_factorizations,
            "iterations": self.iterations,
            "elapsed": self.elapsed,
        }


@dataclass
class EigenResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # (n, k)
    residuals: np.ndarray
    contour: Contour
    stats: SolveStats

    def to_json_dict(self) -> dict:
        return {
            "contour": self.contour.to_json_dict(),
            "eigenvalues": self.eigenvalues.tolist(),
            "residuals": self.residuals.tolist(),
            "stats": self.stats.to_dict(),
        }


def write_eigenvectors(path, block: np.ndarray) -> None:
    """Binary sidecar: 16-byte header (n_rows, n_cols as little-endian
    uint64), then row-major complex entries as little-endian float64
    (re, im) pairs."""
    b = as_block(block)
    with open(path, "wb") as fh:
        fh.write(struct.pack("<QQ", b.shape[0], b.shape[1]))
        fh.write(np.ascontiguousarray(b, dtype="<c16").tobytes())


def read_eigenvectors(path) -> np.ndarray:
    with open(path, "rb") as fh:
        n_rows, n_cols = struct.unpack("<QQ", fh.read(16))
        data = np.frombuffer(fh.read(), dtype="<c16")
    return data.reshape(n_rows, n_cols)


class ProjectorContext:
    """Holds one factorization per quadrature node for reuse across blocks,
    moments, and refinement passes."""

    def __init__(self, pencil: MatrixPencil, rule: QuadratureRule):
        self.pencil = pencil
        self.rule = rule
        self.factorizations = []
        for j, z in enumerate(rule.nodes):
            try:
                self.factorizations.append(shifted_factorize(pencil, z))
            except SingularShiftError as exc:
                raise SingularShiftError(z, node_index=j) from exc
        self.n_factorizations = len(self.factorizations)
        self.n_linear_solves = 0

    def apply(self, block: np.ndarray, moments: int = 1) -> list[np.ndarray]:
        """Returns [S_0 .. S_{moments-1}] with S_m = sum_j w_j z_j^m Y_j,
        Y_j solving (z_j B - A) Y_j = B block.  One solve per node serves
        every moment."""
        v = as_block(block)
        if v.shape[0] != self.pencil.n:
            raise DimensionError("block rows must match pencil dimension")
        bv = sparse_matmat(self.pencil.b, v)
        acc = [np.zeros_like(v) for _ in range(moments)]
        for z, wgt, fac in zip(self.rule.nodes, self.rule.weights,
                               self.factorizations):
            y = fac.solve(bv)
            self.n_linear_solves += v.shape[1]
            zp = 1.0 + 0.0j
            for mth in range(moments):
                acc[mth] += (wgt * zp) * y
                zp *= z
        return acc


def apply_projector(pencil: MatrixPencil, rule: QuadratureRule,
                    v) -> np.ndarray:
    """Quadrature approximation of the spectral projector applied to v."""
    ctx = ProjectorContext(pencil, rule)
    return ctx.apply(as_block(v), moments=1)[0]


def _residuals(pencil: MatrixPencil, lam: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Relative residual ||Ax - lam Bx|| / (||Ax|| + |lam| ||Bx||) per pair."""
    ax = sparse_matmat(pencil.a, x)
    bx = sparse_matmat(pencil.b, x)
    num = np.linalg.norm(ax - lam[None, :] * bx, axis=0)
    den = np.linalg.norm(ax, axis=0) + np.abs(lam) * np.linalg.norm(bx, axis=0)
    den = np.where(den == 0.0, 1e-300, den)
    return num / den


def _rayleigh_ritz(pencil: MatrixPencil, q: np.ndarray):
    aq = sparse_matmat(pencil.a, q)
    bq = sparse_matmat(pencil.b, q)
    a_small = q.conj().T @ aq
    b_small = q.conj().T @ bq
    a_small = 0.5 * (a_small + a_small.conj().T)
    b_small = 0.5 * (b_small + b_small.conj().T)
    w, s = dense_hermitian_gep(a_small, b_small)
    return w, q @ s


def _inside(contour: Contour, lam: np.ndarray) -> np.ndarray:
    return np.array([contour.contains(complex(v, 0.0)) for v in lam])


def cirr_solve(pencil: MatrixPencil, contour: Contour,
               cfg: SolverConfig | None = None, seed: int = 0) -> EigenResult:
    """Moment-based contour-integral Rayleigh-Ritz solve.

    Accumulates the moment blocks S_0..S_{M-1} in a single quadrature pass,
    rank-truncates their stack into a basis, Rayleigh-Ritz extracts pairs
    inside the contour, and re-filters the Ritz block until residuals meet
    tolerance (factorizations are reused across passes).
    """
    cfg = cfg or SolverConfig()
    t0 = time.perf_counter()
    rule = quadrature_for(contour, cfg.n_q)
    ctx = ProjectorContext(pencil, rule)
    rng = np.random.default_rng(seed)
    ncols = cfg.cols_for(contour.expected_count)
    v = rng.standard_normal((pencil.n, ncols)).astype(complex)

    moments = ctx.apply(v, moments=cfg.n_moments)
    stacked = np.hstack(moments)
    best_res = np.inf
    lam = x = res = None
    for it in range(cfg.max_refine):
        try:
            q = rank_truncate_svd(stacked, cfg.rank_rel_tol)
        except RankZeroError:
            break
        w, xs = _rayleigh_ritz(pencil, q)
        keep = _inside(contour, w)
        if not np.any(keep):
            lam = None
            break
        lam, x = w[keep], xs[:, keep]
        res = _residuals(pencil, lam, x)
        best_res = min(best_res, float(res.max()))
        if res.max() <= cfg.tol:
            break
        if it + 1 >= cfg.max_refine:
            break
        stacked = ctx.apply(x, moments=1)[0]

    stats = SolveStats(
        n_linear_solves=ctx.n_linear_solves,
        n_factorizations=ctx.n_factorizations,
        iterations=it + 1,
        elapsed=time.perf_counter() - t0,
    )
    if lam is None or lam.size == 0:
        raise NoEigenvaluesFound(
            f"no eigenvalues inside contour (expected {contour.expected_count})"
        )
    if res.max() > cfg.tol:
        converged = res <= cfg.tol
        if not np.any(converged):
            raise ConvergenceError(best_res)
        lam, x, res = lam[converged], x[:, converged], res[converged]
    order = np.argsort(lam)
    return EigenResult(
        eigenvalues=lam[order],
        eigenvectors=x[:, order],
        residuals=res[order],
        contour=contour,
        stats=stats,
    )


def feast_solve(pencil: MatrixPencil, contour: Contour,
                cfg: SolverConfig | None = None, seed: int = 0) -> EigenResult:
    """Filtered subspace iteration: U <- orthonormalize(P U) with Rayleigh-
    Ritz extraction after each projector application."""
    cfg = cfg or SolverConfig()
    t0 = time.perf_counter()
    rule = quadrature_for(contour, cfg.n_q)
    ctx = ProjectorContext(pencil, rule)
    rng = np.random.default_rng(seed)
    ncols = cfg.cols_for(contour.expected_count)
    u = rng.standard_normal((pencil.n, ncols)).astype(complex)

    best_res = np.inf
    lam = x = res = None
    found_any = False
    for it in range(cfg.max_refine):
        y = ctx.apply(u, moments=1)[0]
        try:
            q = orthonormalize(y, cfg.drop_tol)
        except RankZeroError:
            break
        w, xs = _rayleigh_ritz(pencil, q)
        keep = _inside(contour, w)
        u = xs  # next iterate: the full filtered Ritz block
        if not np.any(keep):
            continue
        found_any = True
        lam, x = w[keep], xs[:, keep]
        res = _residuals(pencil, lam, x)
        best_res = min(best_res, float(res.max()))
        if res.max() <= cfg.tol:
            break

    stats = SolveStats(
        n_linear_solves=ctx.n_linear_solves,
        n_factorizations=ctx.n_factorizations,
        iterations=it + 1,
        elapsed=time.perf_counter() - t0,
    )
    if not found_any or lam is None:
        raise NoEigenvaluesFound(
            f"no eigenvalues inside contour (expected {contour.expected_count})"
        )
    if res.max() > cfg.tol:
        converged = res <= cfg.tol
        if not np.any(converged):
            raise ConvergenceError(best_res)
        lam, x, res = lam[converged], x[:, converged], res[converged]
    order = np.argsort(lam)
    return EigenResult(
        eigenvalues=lam[order],
        eigenvectors=x[:, order],
        residuals=res[order],
        contour=contour,
        stats=stats,
    )


@dataclass
class MultiResult:
    """Per-contour results with isolated failures and aggregate stats."""

    results: list  # EigenResult | None per contour
    errors: list  # Exception | None per contour
    stats: SolveStats

    @property
    def eigenvalues(self) -> np.ndarray:
        vals = [r.eigenvalues for r in self.results if r is not None]
        return np.sort(np.concatenate(vals)) if vals else np.array([])

    def to_json_dict(self) -> dict:
        return {
            "contours": [
                r.to_json_dict() if r is not None else {"error": str(e)}
                for r, e in zip(self.results, self.errors)
            ],
            "eigenvalues": self.eigenvalues.tolist(),
            "stats": self.stats.to_dict(),
        }


def solve_multi(pencil: MatrixPencil, contours, cfg: SolverConfig | None = None,
                solver: str = "cirr", seed: int = 0) -> MultiResult:
    """Solve each contour independently; a failing contour never aborts its
    siblings.  Duplicate eigenvalues across contours keep the copy with the
    smaller residual."""
    if solver not in ("cirr", "feast"):
        raise ParameterError(f"unknown solver {solver!r}")
    fn = cirr_solve if solver == "cirr" else feast_solve
    cfg = cfg or SolverConfig()
    t0 = time.perf_counter()
    results: list = []
    errors: list = []
    agg = SolveStats()
    for i, contour in enumerate(contours):
        try:
            r = fn(pencil, contour, cfg, seed=seed + i)
            results.append(r)
            errors.append(None)
            agg.n_linear_solves += r.stats.n_linear_solves
            agg.n_factorizations += r.stats.n_factorizations
            agg.iterations += r.stats.iterations
        except (NoEigenvaluesFound, ConvergenceError, SingularShiftError,
                RankZeroError) as exc:
            results.append(None)
            errors.append(exc)
    _dedupe(results)
    agg.elapsed = time.perf_counter() - t0
    return MultiResult(results=results, errors=errors, stats=agg)


def _dedupe(results) -> None:
    """Drop cross-contour duplicates (within 1e-8 of the global span),
    keeping the smaller residual, mutating results in place."""
    all_vals = [
        (r.eigenvalues[i], r.residuals[i], ri, i)
        for ri, r in enumerate(results)
        if r is not None
        for i in range(len(r.eigenvalues))
    ]
    if len(all_vals) < 2:
        return
    vals = np.array([v[0] for v in all_vals])
    span = vals.max() - vals.min()
    tol = 1e-8 * max(span, 1e-300)
    order = np.argsort(vals)
    drop: dict[int, set] = {}
    prev = order[0]
    for idx in order[1:]:
        if abs(all_vals[idx][0] - all_vals[prev][0]) <= tol and \
                all_vals[idx][2] != all_vals[prev][2]:
            loser = idx if all_vals[idx][1] >= all_vals[prev][1] else prev
            winner = idx if loser is prev else prev
            drop.setdefault(all_vals[loser][2], set()).add(all_vals[loser][3])
            prev = winner
        else:
            prev = idx
    for ri, cols in drop.items():
        r = results[ri]
        keep = np.array([i not in cols for i in range(len(r.eigenvalues))])
        results[ri] = EigenResult(
            eigenvalues=r.eigenvalues[keep],
            eigenvectors=r.eigenvectors[:, keep],
            residuals=r.residuals[keep],
            contour=r.contour,
            stats=r.stats,
        )
