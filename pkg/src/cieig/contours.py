"""Integration-contour construction.

Holds the contour/quadrature geometry, the KDE-driven adaptive partitioner,
and the knowledge-aware random baseline.  Scouting-based contours live in
cieig.scouting.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CutUndefinedError,
    EmptyPredictionError,
    ParameterError,
)
from .kernels import kde_eval

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
SCAN_POINTS = 2048


@dataclass(frozen=True)
class Contour:
    """A closed integration path: circle or axis-aligned rectangle."""

    shape: str  # "circle" | "rect"
    center: complex = 0.0 + 0.0j  # circle
    radius: float = 0.0  # circle
    re_min: float = 0.0  # rect
    re_max: float = 0.0
    im_min: float = 0.0
    im_max: float = 0.0
    expected_count: int = 0
    source: str = "manual"  # kde | scout | random | manual

    def __post_init__(self):
        if self.shape == "circle":
            if self.radius <= 0:
                raise ParameterError("circle radius must be positive")
        elif self.shape == "rect":
            if self.re_min >= self.re_max or self.im_min >= self.im_max:
                raise ParameterError("rect bounds must be ordered")
            if self.source == "scout" and self.aspect_ratio() > 5.0 + 1e-12:
                raise ParameterError("scout rect aspect ratio must be <= 5")
        else:
            raise ParameterError(f"unknown contour shape {self.shape!r}")

    def aspect_ratio(self) -> float:
        if self.shape == "circle":
            return 1.0
        w = self.re_max - self.re_min
        h = self.im_max - self.im_min
        return max(w, h) / min(w, h)

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        """Strict interior test; slack loosens the boundary outward."""
        if self.shape == "circle":
            return abs(z - self.center) < self.radius + slack
        return (
            self.re_min - slack < z.real < self.re_max + slack
            and self.im_min - slack < z.imag < self.im_max + slack
        )

    def real_interval(self) -> tuple[float, float]:
        if self.shape == "circle":
            return self.center.real - self.radius, self.center.real + self.radius
        return self.re_min, self.re_max

    def area(self) -> float:
        if self.shape == "circle":
            return np.pi * self.radius**2
        return (self.re_max - self.re_min) * (self.im_max - self.im_min)

    def to_json_dict(self) -> dict:
        if self.shape == "circle":
            return {
                "shape": "circle",
                "center": [self.center.real, self.center.imag],
                "radius": self.radius,
                "expected_count": self.expected_count,
                "source": self.source,
            }
        return {
            "shape": "rect",
            "re_min": self.re_min,
            "re_max": self.re_max,
            "im_min": self.im_min,
            "im_max": self.im_max,
            "expected_count": self.expected_count,
            "source": self.source,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "Contour":
        if d["shape"] == "circle":
            return cls(
                shape="circle",
                center=complex(d["center"][0], d["center"][1]),
                radius=float(d["radius"]),
                expected_count=int(d.get("expected_count", 0)),
                source=d.get("source", "manual"),
            )
        return cls(
            shape="rect",
            re_min=float(d["re_min"]),
            re_max=float(d["re_max"]),
            im_min=float(d["im_min"]),
            im_max=float(d["im_max"]),
            expected_count=int(d.get("expected_count", 0)),
            source=d.get("source", "manual"),
        )


def contours_to_json(contours) -> str:
    return json.dumps({"contours": [c.to_json_dict() for c in contours]})


def contours_from_json(text: str):
    data = json.loads(text)
    return [Contour.from_json_dict(d) for d in data["contours"]]


@dataclass(frozen=True)
class QuadratureRule:
    """Discretized contour integral: sum_j w_j f(z_j) approximates
    (1/2 pi i) oint f(z) dz."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n_q(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class SpectrumPrediction:
    """Predicted eigenvalues, ascending."""

    values: np.ndarray
    source: str = "manual"  # eno | noisy-oracle | scout-ritz | oracle | manual
    problem_id: str = ""

    def __post_init__(self):
        if len(self.values) == 0:
            raise EmptyPredictionError("prediction holds no values")
        if np.any(np.diff(self.values) < 0):
            raise ParameterError("prediction values must ascend")

    @property
    def m(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Interval:
    start: float
    end: float
    count: int


@dataclass(frozen=True)
class IntervalPartition:
    intervals: tuple


# ---------------------------------------------------------------------------
# KDE sparsity machinery


def kde_sparsity(start: float, end: float, eigs_in, w: float, t) -> float | np.ndarray:
    """Gaussian-kernel spectral density on an interval.

    G(t) = sum_j exp(-w / (end-start)^2 * (t - lambda_j)^2).
    """
    if end <= start:
        raise ParameterError("degenerate interval")
    if w <= 0:
        raise ParameterError("kernel weight must be positive")
    eigs = np.asarray(eigs_in, dtype=float)
    scalar = np.isscalar(t) or np.ndim(t) == 0
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if eigs.size == 0:
        out = np.zeros_like(ts)
    else:
        coef = w / (end - start) ** 2
        out = kde_eval(ts, eigs, coef)
    return float(out[0]) if scalar else out


def find_cut(start: float, end: float, eigs_in, w: float) -> float:
    """Minimizer of the sparsity function over the open interval.

    Uniform 2048-point scan, then one golden-section pass down to
    1e-10 * width.  Ties break toward the leftmost minimizer.
    """
    eigs = np.asarray(eigs_in, dtype=float)
    if eigs.size < 2:
        raise CutUndefinedError("need at least 2 eigenvalues to cut")
    width = end - start
    ts = np.linspace(start, end, SCAN_POINTS + 2)[1:-1]
    g = kde_sparsity(start, end, eigs, w, ts)
    i = int(np.argmin(g))  # argmin returns the first (leftmost) minimum
    lo = ts[i - 1] if i > 0 else start
    hi = ts[i + 1] if i < len(ts) - 1 else end

    def f(t):
        return kde_sparsity(start, end, eigs, w, t)

    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > 1e-10 * width:
        if fc <= fd:  # <= biases toward the left on ties
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def construct_contours(pred: SpectrumPrediction, n_min: int = 10, n_max: int = 50,
                       w: float = 10.0, margin: float = 0.5):
    """Adaptive KDE partition of the predicted spectrum into circular contours.

    Recursively splits any interval holding more than n_max predictions at
    the sparsest point, then merges undersized intervals into their nearest
    (gap-wise) neighbor and re-splits, iterating to a fixed point (at most
    10 sweeps).  Each final interval becomes a circle spanning it.
    """
    if n_min < 1 or n_max < n_min:
        raise ParameterError("need 1 <= n_min <= n_max")
    if margin < 0:
        raise ParameterError("margin must be non-negative")
    values = np.sort(np.asarray(pred.values, dtype=float))
    m = len(values)
    span = values[-1] - values[0]
    if span == 0.0:
        span = max(abs(values[0]), 1.0) * 1e-6
    ext = margin * span / m
    lo, hi = values[0] - ext, values[-1] + ext
    if ext == 0.0:
        # keep boundary predictions strictly inside
        pad = 1e-12 * max(span, 1.0)
        lo, hi = lo - pad, hi + pad

    def split_interval(start, end, idx_lo, idx_hi):
        """Recursive N_max split; eigenvalue ownership tracked by index range
        into the sorted prediction so counts always total m."""
        count = idx_hi - idx_lo
        if count <= n_max:
            return [(start, end, idx_lo, idx_hi)]
        t_cut = find_cut(start, end, values[idx_lo:idx_hi], w)
        mid = idx_lo + int(np.searchsorted(values[idx_lo:idx_hi], t_cut))
        if mid == idx_lo or mid == idx_hi:
            # cut fell outside the owned values; force a median split
            mid = idx_lo + count // 2
            t_cut = 0.5 * (values[mid - 1] + values[mid])
        left = split_interval(start, t_cut, idx_lo, mid)
        right = split_interval(t_cut, end, mid, idx_hi)
        return left + right

    segs = split_interval(lo, hi, 0, m)

    for _ in range(10):
        changed = False
        # merge pass: absorb undersized intervals into the gap-nearest neighbor
        i = 0
        while len(segs) > 1 and i < len(segs):
            start, end, a, b = segs[i]
            if b - a >= n_min:
                i += 1
                continue
            gap_left = np.inf
            gap_right = np.inf
            if i > 0:
                la, lb = segs[i - 1][2], segs[i - 1][3]
                gap_left = values[a] - values[lb - 1] if lb > la and b > a else 0.0
            if i < len(segs) - 1:
                ra, rb = segs[i + 1][2], segs[i + 1][3]
                gap_right = values[ra] - values[b - 1] if rb > ra and b > a else 0.0
            if gap_left <= gap_right:
                ps, pe, pa, pb = segs[i - 1]
                segs[i - 1:i + 1] = [(ps, end, pa, b)]
            else:
                ns, ne, na, nb = segs[i + 1]
                segs[i:i + 2] = [(start, ne, a, nb)]
            changed = True
        # re-split pass for merged intervals that now violate n_max
        out = []
        for start, end, a, b in segs:
            if b - a > n_max:
                out.extend(split_interval(start, end, a, b))
                changed = True
            else:
                out.append((start, end, a, b))
        segs = out
        if not changed:
            break

    intervals = tuple(Interval(s, e, b - a) for s, e, a, b in segs)
    contours = [
        Contour(
            shape="circle",
            center=complex(0.5 * (iv.start + iv.end), 0.0),
            radius=0.5 * (iv.end - iv.start),
            expected_count=iv.count,
            source="kde",
        )
        for iv in intervals
    ]
    return IntervalPartition(intervals=intervals), contours


# ---------------------------------------------------------------------------
# quadrature rules


def quadrature_for(contour: Contour, n_q: int = 32) -> QuadratureRule:
    """Quadrature nodes/weights normalized so that sum_j w_j / (z_j - c)
    tends to 1 for a pole c enclosed by the contour.

    Circle: midpoint trapezoid rule (exponentially convergent).
    Rect: Gauss-Legendre with n_q/4 nodes per edge.
    """
    if n_q < 4 or n_q % 2 != 0:
        raise ParameterError("n_q must be even and >= 4")
    if contour.shape == "circle":
        j = np.arange(n_q)
        theta = 2.0 * np.pi * (j + 0.5) / n_q
        rot = np.exp(1j * theta)
        nodes = contour.center + contour.radius * rot
        weights = contour.radius * rot / n_q
        return QuadratureRule(nodes=nodes, weights=weights)
    if n_q % 4 != 0:
        raise ParameterError("rect contours need n_q divisible by 4")
    per_edge = n_q // 4
    gl_x, gl_w = np.polynomial.legendre.leggauss(per_edge)
    corners = [
        complex(contour.re_min, contour.im_min),
        complex(contour.re_max, contour.im_min),
        complex(contour.re_max, contour.im_max),
        complex(contour.re_min, contour.im_max),
    ]
    nodes = []
    weights = []
    for k in range(4):  # counterclockwise edges
        p0, p1 = corners[k], corners[(k + 1) % 4]
        half = 0.5 * (p1 - p0)
        mid = 0.5 * (p1 + p0)
        nodes.append(mid + gl_x * half)
        weights.append(gl_w * half / (2.0j * np.pi))
    return QuadratureRule(
        nodes=np.concatenate(nodes), weights=np.concatenate(weights)
    )


# ---------------------------------------------------------------------------
# knowledge-aware random baseline


def random_contours(truth_eigenvalues, seed: int):
    """Random but spectrum-aware circular contours.

    Draws the contour count uniformly from 1..16, partitions the spectral
    bounding interval at uniform cut points, then samples each circle's
    center uniformly and radius log-uniformly on the prescribed range.
    """
    eigs = np.sort(np.asarray(truth_eigenvalues, dtype=float))
    if eigs.size == 0:
        raise EmptyPredictionError("empty ground truth")
    rng = np.random.default_rng(seed)
    m = eigs.size
    lam_min, lam_max = eigs[0], eigs[-1]
    span = lam_max - lam_min
    if span == 0.0:
        span = max(abs(lam_min), 1.0) * 1e-6
        lam_max = lam_min + span
    n_gamma = int(rng.integers(1, 17))
    cuts = np.sort(rng.uniform(lam_min, lam_max, size=n_gamma - 1))
    bounds = np.concatenate([[lam_min], cuts, [lam_max]])
    r_min = span / (2.0 * m)
    r_max = span / n_gamma
    contours = []
    for k in range(n_gamma):
        a, b = bounds[k], bounds[k + 1]
        center = rng.uniform(a, b)
        if r_min >= r_max:
            radius = r_min  # degenerate range; clamp (flagged upstream)
        else:
            radius = float(np.exp(rng.uniform(np.log(r_min), np.log(r_max))))
        inside = int(np.count_nonzero(np.abs(eigs - center) < radius))
        contours.append(
            Contour(
                shape="circle",
                center=complex(center, 0.0),
                radius=radius,
                expected_count=inside,
                source="random",
            )
        )
    return contours


def contour_area(contours) -> float:
    """Total enclosed area: pi r^2 per circle, width x height per rect."""
    return float(sum(c.area() for c in contours))
