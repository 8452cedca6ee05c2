"""Benchmark harness: strategy pipelines, metrics, and report emission."""

from __future__ import annotations

import csv
import json
import statistics
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .contours import (
    SpectrumPrediction,
    construct_contours,
    contour_area,
    random_contours,
)
from .errors import DatasetError, MetricError, ParameterError
from .predictions import load_prediction, noisy_oracle_predict, ritz_as_prediction
from .problems import GroundTruth, dense_ground_truth, read_dataset, target_count
from .scouting import calibrate_margin, scout, scout_contour
from .solvers import SolverConfig, solve_multi
from .sparse import MatrixPencil

STRATEGIES = (
    "deepcontour",
    "scout-arnoldi",
    "scout-lanczos",
    "scout-ks",
    "scout+kde",
    "random",
    "oracle-kde",
)

_SCOUT_METHOD = {
    "scout-arnoldi": "arnoldi",
    "scout-lanczos": "lanczos",
    "scout-ks": "krylov-schur-restarted",
    "scout+kde": "lanczos",
}


@dataclass(frozen=True)
class BenchRecord:
    """One benchmark measurement row."""

    problem_id: str
    strategy: str
    tolerance: float
    prep_time: float
    solve_time: float
    total_time: float
    missed: int
    found: int
    contour_area: float
    seed: int

    def to_dict(self) -> dict:
        return {
            "problem_id": self.problem_id,
            "strategy": self.strategy,
            "tolerance": self.tolerance,
            "prep_time": self.prep_time,
            "solve_time": self.solve_time,
            "total_time": self.total_time,
            "missed": self.missed,
            "found": self.found,
            "contour_area": self.contour_area,
            "seed": self.seed,
        }


@dataclass
class BenchConfig:
    """Knobs shared by all pipeline strategies."""

    n_q: int = 32
    scout_k: int = 60
    scout_margin: float = 1.2  # used when no truth is available to calibrate
    kde_n_min: int = 10
    kde_n_max: int = 50
    kde_w: float = 10.0
    kde_margin: float = 0.5
    noise_rel: float = 0.01  # noisy-oracle stub noise level
    match_tol: float = 1e-6
    prediction_path: str | None = None  # deepcontour prediction file
    max_refine: int = 8


# ---------------------------------------------------------------------------
# metrics


def match_found(found, truth: GroundTruth, match_tol: float = 1e-6):
    """Greedy one-to-one nearest matching of found values against truth.

    Returns (matched, missed) with missed = M - matched; match_tol is
    relative to the spectral span.
    """
    if match_tol <= 0:
        raise ParameterError("match_tol must be positive")
    truth_vals = np.asarray(truth.eigenvalues, dtype=float)
    found_vals = np.sort(np.asarray(found, dtype=float))
    span = float(truth_vals.max() - truth_vals.min())
    tol = match_tol * max(span, 1e-300)
    taken = np.zeros(truth_vals.size, dtype=bool)
    matched = 0
    # visit found values by their distance to the nearest truth value so the
    # greedy pass is order-independent
    if found_vals.size:
        dists = np.min(np.abs(found_vals[:, None] - truth_vals[None, :]), axis=1)
        for fi in np.argsort(dists):
            d = np.abs(truth_vals - found_vals[fi])
            d[taken] = np.inf
            ti = int(np.argmin(d))
            if d[ti] <= tol:
                taken[ti] = True
                matched += 1
    return matched, truth.m - matched


def speedup(baseline: BenchRecord, ours: BenchRecord) -> dict:
    """End-to-end and solver-only time ratios, baseline over ours."""
    if baseline.problem_id != ours.problem_id or \
            baseline.tolerance != ours.tolerance:
        raise ParameterError("speedup requires matching problem and tolerance")
    if ours.total_time <= 0 or ours.solve_time <= 0:
        raise MetricError("zero denominator in speedup")
    return {
        "e2e": baseline.total_time / ours.total_time,
        "solver": baseline.solve_time / ours.solve_time,
    }


# ---------------------------------------------------------------------------
# pipelines


def _solve_stage(pencil: MatrixPencil, contours, tol: float,
                 cfg: BenchConfig, truth: GroundTruth, seed: int):
    t0 = time.perf_counter()
    solver_cfg = SolverConfig(n_q=cfg.n_q, tol=tol, max_refine=cfg.max_refine)
    multi = solve_multi(pencil, contours, solver_cfg, solver="cirr", seed=seed)
    solve_time = time.perf_counter() - t0
    found_vals = multi.eigenvalues
    matched, missed = match_found(found_vals, truth, cfg.match_tol)
    return solve_time, matched, missed, len(found_vals), multi


def run_strategy(pencil: MatrixPencil, truth: GroundTruth, strategy: str,
                 tol: float, cfg: BenchConfig, seed: int,
                 prediction: SpectrumPrediction | None = None) -> BenchRecord:
    """Execute one (strategy, tolerance, seed) benchmark cell in memory."""
    if strategy not in STRATEGIES:
        raise ParameterError(f"unknown strategy {strategy!r}")
    t0 = time.perf_counter()

    if strategy in _SCOUT_METHOD:
        ritz = scout(pencil, _SCOUT_METHOD[strategy], cfg.scout_k, truth.m,
                     seed)
        if strategy == "scout+kde":
            pred = ritz_as_prediction(ritz, pencil.problem_id)
            _, contours = construct_contours(
                pred, cfg.kde_n_min, cfg.kde_n_max, cfg.kde_w, cfg.kde_margin)
        else:
            mf = calibrate_margin(ritz, truth) if truth is not None \
                else cfg.scout_margin
            contours = [scout_contour(ritz, mf)]
    elif strategy == "random":
        contours = random_contours(truth.eigenvalues, seed)
    else:
        if strategy == "oracle-kde":
            pred = SpectrumPrediction(values=np.asarray(truth.eigenvalues),
                                      source="manual",
                                      problem_id=pencil.problem_id)
        elif prediction is not None:
            pred = prediction
        elif cfg.prediction_path is not None:
            pred = load_prediction(cfg.prediction_path)
        else:
            pred = noisy_oracle_predict(truth.eigenvalues, cfg.noise_rel,
                                        seed, pencil.problem_id)
        _, contours = construct_contours(
            pred, cfg.kde_n_min, cfg.kde_n_max, cfg.kde_w, cfg.kde_margin)

    prep_time = time.perf_counter() - t0
    solve_time, _, missed, found, _ = _solve_stage(
        pencil, contours, tol, cfg, truth, seed)
    return BenchRecord(
        problem_id=pencil.problem_id,
        strategy=strategy,
        tolerance=tol,
        prep_time=prep_time,
        solve_time=solve_time,
        total_time=prep_time + solve_time,
        missed=missed,
        found=found,
        contour_area=contour_area(contours),
        seed=seed,
    )


def run_pipeline(dataset_path, strategy: str, tol: float,
                 cfg: BenchConfig | None = None, seed: int = 0) -> BenchRecord:
    """Dataset-file front end of run_strategy: load, derive truth if absent,
    run the three pipeline stages with per-stage timing."""
    cfg = cfg or BenchConfig()
    pencil, _, truth = read_dataset(dataset_path)
    if truth is None:
        truth = dense_ground_truth(pencil, target_count(pencil.n))
    return run_strategy(pencil, truth, strategy, tol, cfg, seed)


def run_sensitivity(pencil: MatrixPencil, truth: GroundTruth, n_seeds: int,
                    tol: float, cfg: BenchConfig | None = None) -> dict:
    """Random-contour sensitivity study: solve-time spread and missed rate.

    Solver failures count as missed-all records instead of aborting."""
    if n_seeds < 10:
        raise ParameterError("n_seeds must be >= 10")
    cfg = cfg or BenchConfig()
    records = []
    for seed in range(n_seeds):
        contours = random_contours(truth.eigenvalues, seed)
        t0 = time.perf_counter()
        try:
            solve_time, _, missed, found, _ = _solve_stage(
                pencil, contours, tol, cfg, truth, seed)
        except Exception:
            solve_time = time.perf_counter() - t0
            missed, found = truth.m, 0
        records.append(BenchRecord(
            problem_id=pencil.problem_id, strategy="random", tolerance=tol,
            prep_time=0.0, solve_time=solve_time, total_time=solve_time,
            missed=missed, found=found,
            contour_area=contour_area(contours), seed=seed,
        ))
    times = [r.solve_time for r in records]
    mean_t = statistics.fmean(times)
    cv_time = statistics.stdev(times) / mean_t if mean_t > 0 else 0.0
    mean_missed_rate = statistics.fmean(r.missed / truth.m for r in records)
    return {
        "cv_time": cv_time,
        "mean_missed_rate": mean_missed_rate,
        "records": records,
    }


# ---------------------------------------------------------------------------
# report assembly


@dataclass
class BenchReport:
    records: list

    def aggregates(self) -> dict:
        """Per (strategy, tolerance) mean/stdev/median of the timing and
        accuracy columns, plus the per-strategy time CV."""
        groups: dict = {}
        for r in self.records:
            groups.setdefault((r.strategy, r.tolerance), []).append(r)
        out = {}
        for (strat, tol), recs in groups.items():
            entry = {}
            for metric in ("prep_time", "solve_time", "total_time", "missed",
                           "found", "contour_area"):
                xs = [float(getattr(r, metric)) for r in recs]
                entry[metric] = {
                    "mean": statistics.fmean(xs),
                    "stdev": statistics.stdev(xs) if len(xs) > 1 else 0.0,
                    "median": statistics.median(xs),
                }
            mean_t = entry["total_time"]["mean"]
            entry["cv_time"] = (entry["total_time"]["stdev"] / mean_t
                                if mean_t > 0 else 0.0)
            out[f"{strat}@{tol:g}"] = entry
        return out

    def speedups(self, ours: str = "deepcontour") -> dict:
        """Mean and median baseline/ours time ratios per (baseline,
        tolerance), paired on (problem_id, seed)."""
        mine = {
            (r.problem_id, r.tolerance, r.seed): r
            for r in self.records if r.strategy == ours
        }
        pairs: dict = {}
        for r in self.records:
            if r.strategy == ours:
                continue
            key = (r.problem_id, r.tolerance, r.seed)
            if key in mine:
                pairs.setdefault((r.strategy, r.tolerance), []).append(
                    speedup(r, mine[key]))
        out = {}
        for (strat, tol), ss in pairs.items():
            out[f"{strat}@{tol:g}"] = {
                "e2e_mean": statistics.fmean(s["e2e"] for s in ss),
                "e2e_median": statistics.median(s["e2e"] for s in ss),
                "solver_mean": statistics.fmean(s["solver"] for s in ss),
                "solver_median": statistics.median(s["solver"] for s in ss),
            }
        return out

    def to_json_dict(self) -> dict:
        return {
            "records": [r.to_dict() for r in self.records],
            "aggregates": self.aggregates(),
            "speedups": self.speedups(),
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")

    def write_csv(self, path) -> None:
        """Plot-ready long format: problem_id,strategy,tolerance,metric,value."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["problem_id", "strategy", "tolerance", "metric",
                        "value"])
            for r in self.records:
                for metric in ("prep_time", "solve_time", "total_time",
                               "missed", "found", "contour_area"):
                    w.writerow([r.problem_id, r.strategy, f"{r.tolerance:g}",
                                metric, repr(float(getattr(r, metric)))])

    @classmethod
    def from_json(cls, path) -> "BenchReport":
        with open(path) as fh:
            doc = json.load(fh)
        try:
            records = [BenchRecord(**d) for d in doc["records"]]
        except (KeyError, TypeError) as exc:
            raise DatasetError(f"malformed report: {exc}") from exc
        return cls(records=records)
