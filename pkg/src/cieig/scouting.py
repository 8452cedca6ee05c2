"""Scouting baselines: fixed-budget Krylov estimates and bounding-box contours.

All scouts run on the shift-and-invert operator A^{-1} B (shift fixed at
zero), whose dominant Ritz values map to the smallest-magnitude eigenvalues
of the pencil.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass

import numpy as np

from .contours import Contour
from .errors import EmptyPredictionError, ParameterError, ParameterWarning
from .linalg import shifted_factorize
from .problems import GroundTruth
from .sparse import MatrixPencil, sparse_matmat

SCOUT_METHODS = ("lanczos", "arnoldi", "krylov-schur-restarted")


@dataclass(frozen=True)
class RitzEstimate:
    method: str
    k_iters: int
    ritz_values: np.ndarray  # ascending
    elapsed: float


def _b_matvec(pencil: MatrixPencil, v: np.ndarray) -> np.ndarray:
    return (pencil.b.to_scipy() @ v)


def _lanczos_ritz(pencil, op, k, rng):
    """B-inner-product Lanczos with full reorthogonalization.

    Returns Ritz values of the B-self-adjoint operator op (= A^{-1}B).
    """
    n = pencil.n
    bs = pencil.b.to_scipy()
    v = rng.standard_normal(n)
    bv = bs @ v
    v /= np.sqrt(np.real(v @ bv))
    basis = [v]
    b_basis = [bs @ v]
    alphas, betas = [], []
    for _ in range(min(k, n)):
        w = op(b_basis[-1])
        alpha = float(np.real(np.vdot(b_basis[-1], w)))
        alphas.append(alpha)
        w = w - alpha * basis[-1]
        if len(basis) > 1:
            w = w - betas[-1] * basis[-2]
        for q, bq in zip(basis, b_basis):  # full reorthogonalization
            w = w - q * np.vdot(bq, w)
        bw = bs @ w
        beta = float(np.sqrt(np.real(np.vdot(w, bw)).clip(min=0.0)))
        if beta < 1e-14:
            break
        betas.append(beta)
        basis.append(w / beta)
        b_basis.append(bw / beta)
    t = np.diag(np.array(alphas))
    if betas:
        off = np.array(betas[: len(alphas) - 1])
        t += np.diag(off, 1) + np.diag(off, -1)
    return np.linalg.eigvalsh(t)


def _arnoldi_ritz(pencil, op, k, rng):
    """Euclidean Arnoldi on op; returns (generally complex) Ritz values."""
    n = pencil.n
    bs = pencil.b.to_scipy()
    v = rng.standard_normal(n).astype(complex)
    v /= np.linalg.norm(v)
    basis = [v]
    kk = min(k, n)
    h = np.zeros((kk + 1, kk), dtype=complex)
    steps = 0
    for j in range(kk):
        w = op(bs @ basis[j])
        for i, q in enumerate(basis):
            h[i, j] = np.vdot(q, w)
            w = w - h[i, j] * q
        for i, q in enumerate(basis):  # second orthogonalization pass
            c = np.vdot(q, w)
            h[i, j] += c
            w = w - c * q
        steps = j + 1
        nrm = np.linalg.norm(w)
        h[j + 1, j] = nrm
        if nrm < 1e-14:
            break
        basis.append(w / nrm)
    return np.linalg.eigvals(h[:steps, :steps])


def _thick_restart_ritz(pencil, op, k, m, rng):
    """Thick-restart Lanczos, basis capped at 2m, keeping the m dominant
    Ritz vectors at each restart; k total operator applications.

    Tracks the operator images of the basis so the projected matrix can be
    rebuilt after restarts (images transform by the same rotation as the
    basis, so no extra solves are needed).
    """
    n = pencil.n
    bs = pencil.b.to_scipy()
    cap = min(max(2 * m, 4), n)
    v = rng.standard_normal(n)
    v /= np.sqrt(np.real(v @ (bs @ v)))
    basis = [v]
    images = []  # images[i] = op(B basis[i])

    def projected(nvec):
        vmat = np.column_stack(basis[:nvec])
        wmat = np.column_stack(images[:nvec])
        h = np.real(vmat.T @ (bs @ wmat))
        return 0.5 * (h + h.T)

    applied = 0
    budget = min(k, n)
    while applied < budget:
        w = op(bs @ basis[-1])
        applied += 1
        images.append(w)
        w_orth = w.copy()
        for _ in range(2):
            for q in basis:
                w_orth = w_orth - q * np.real(np.vdot(bs @ q, w_orth))
        beta = float(np.sqrt(np.real(np.vdot(w_orth, bs @ w_orth)).clip(min=0.0)))
        if beta < 1e-12 * np.linalg.norm(w):
            break  # invariant subspace reached
        w_orth /= beta
        if len(basis) >= cap:
            h = projected(len(images))
            theta, s = np.linalg.eigh(h)
            order = np.argsort(-np.abs(theta))[:m]
            vmat = np.column_stack(basis[: len(images)])
            wmat = np.column_stack(images)
            kept_v = vmat @ s[:, order]
            kept_w = wmat @ s[:, order]
            basis = [kept_v[:, i] for i in range(kept_v.shape[1])] + [w_orth]
            images = [kept_w[:, i] for i in range(kept_w.shape[1])]
        else:
            basis.append(w_orth)
    h = projected(len(images))
    return np.linalg.eigvalsh(h)


def scout(pencil: MatrixPencil, method: str, k_iters: int, m: int,
          seed: int) -> RitzEstimate:
    """Fixed-budget Krylov scout for the m smallest-magnitude eigenvalues."""
    if method not in SCOUT_METHODS:
        raise ParameterError(f"unknown scout method {method!r}")
    if k_iters < m:
        raise ParameterError("k_iters must be >= m")
    t0 = time.perf_counter()
    fac = shifted_factorize(pencil, 0.0)  # factors (0*B - A) = -A

    def op(x):
        # A^{-1} x via the (-A) factorization
        y = -fac.solve(np.asarray(x, dtype=complex)[:, None])[:, 0]
        return np.real(y) if method != "arnoldi" else y

    rng = np.random.default_rng(seed)
    if method == "lanczos":
        theta = _lanczos_ritz(pencil, op, k_iters, rng)
    elif method == "arnoldi":
        theta = np.real(_arnoldi_ritz(pencil, op, k_iters, rng))
    else:
        theta = _thick_restart_ritz(pencil, op, k_iters, m, rng)
    theta = theta[np.abs(theta) > 1e-300]
    order = np.argsort(-np.abs(theta))[:m]
    lam = np.sort(1.0 / theta[order])
    elapsed = time.perf_counter() - t0
    return RitzEstimate(method=method, k_iters=k_iters, ritz_values=lam,
                        elapsed=elapsed)


def scout_contour(ritz: RitzEstimate, margin_factor: float = 1.2) -> Contour:
    """Safety-margin-expanded bounding rectangle around the Ritz values."""
    if margin_factor < 1.0:
        raise ParameterError("margin_factor must be >= 1")
    vals = np.asarray(ritz.ritz_values, dtype=float)
    if vals.size == 0:
        raise EmptyPredictionError("empty Ritz estimate")
    lo, hi = float(vals.min()), float(vals.max())
    width = hi - lo
    if width <= 0.0:
        width = 1e-6 * max(abs(lo), 1e-300)
        warnings.warn("degenerate Ritz span; using minimum width",
                      ParameterWarning)
        lo, hi = lo - 0.5 * width, hi + 0.5 * width
    pad = 0.5 * (margin_factor - 1.0) * width
    re_min, re_max = lo - pad, hi + pad
    new_width = re_max - re_min
    # half-height width/10 gives height width/5, i.e. aspect exactly 5,
    # the largest allowed; a taller box would only inflate the area
    half_h = new_width / 10.0
    return Contour(
        shape="rect",
        re_min=re_min,
        re_max=re_max,
        im_min=-half_h,
        im_max=half_h,
        expected_count=len(vals),
        source="scout",
    )


def calibrate_margin(ritz: RitzEstimate, truth: GroundTruth,
                     step: float = 0.01) -> float:
    """Smallest margin factor (on a 1 + i*step grid) whose scout rectangle
    contains every ground-truth eigenvalue."""
    if step <= 0:
        raise ParameterError("step must be positive")
    eigs = np.asarray(truth.eigenvalues, dtype=float)
    i = 0
    while True:
        mf = 1.0 + i * step
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ParameterWarning)
            c = scout_contour(ritz, mf)
        if eigs.min() >= c.re_min and eigs.max() <= c.re_max:
            return mf
        i += 1
