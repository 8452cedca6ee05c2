"""Spectrum prediction files: schema v1 JSON read/write and stub predictors."""

from __future__ import annotations

import json
from datetime import datetime, timezone

import numpy as np

from .contours import SpectrumPrediction
from .errors import FormatError, ValidationError, VersionError

SCHEMA_VERSION = 1
PREDICTION_SOURCES = ("eno", "noisy-oracle", "scout-ritz")


def write_prediction(path, pred: SpectrumPrediction) -> None:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "problem_id": pred.problem_id,
        "source": pred.source,
        "values": [float(v) for v in pred.values],
        "created_at": datetime.now(timezone.utc).isoformat(),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_prediction(path) -> SpectrumPrediction:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError("prediction document must be a JSON object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise VersionError(f"unsupported schema_version {version!r}")
    for key in ("problem_id", "source", "values"):
        if key not in doc:
            raise FormatError(f"missing required key {key!r}")
    if doc["source"] not in PREDICTION_SOURCES:
        raise ValidationError(f"unknown source {doc['source']!r}")
    values = np.asarray(doc["values"], dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ValidationError("values must be a nonempty flat list")
    if np.any(np.diff(values) < 0):
        raise ValidationError("values must be sorted ascending")
    return SpectrumPrediction(values=values, source=doc["source"],
                              problem_id=doc["problem_id"])


def noisy_oracle_predict(truth_eigenvalues, rel_noise: float, seed: int,
                         problem_id: str = "") -> SpectrumPrediction:
    """Ground truth perturbed by Gaussian noise with std rel_noise * span."""
    eigs = np.sort(np.asarray(truth_eigenvalues, dtype=float))
    span = float(eigs.max() - eigs.min())
    rng = np.random.default_rng(seed)
    noisy = np.sort(eigs + rng.standard_normal(eigs.size) * rel_noise * span)
    return SpectrumPrediction(values=noisy, source="noisy-oracle",
                              problem_id=problem_id)


def ritz_as_prediction(ritz, problem_id: str = "") -> SpectrumPrediction:
    return SpectrumPrediction(values=np.sort(np.asarray(ritz.ritz_values,
                                                        dtype=float)),
                              source="scout-ritz", problem_id=problem_id)
