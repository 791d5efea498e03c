"""Fitted-model surface: coefficient curve, prediction, null regions, JSON I/O."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .basis import BSplineBasis, eval_basis_many, make_basis
from .design import FunctionalDataset, compute_U
from .solver import FitResult, clamped_probs

_PREDICT_CLAMP = 1e-5


@dataclass(frozen=True)
class SflrModel:
    """Immutable fitted model: basis, fit result, training grid, penalty order."""

    basis: BSplineBasis
    fit: FitResult
    training_grid: np.ndarray
    m: int = 2


def beta_hat(model: SflrModel, t) -> float | np.ndarray:
    """Estimated coefficient function at t (scalar or array)."""
    scalar = np.isscalar(t)
    vals = eval_basis_many(model.basis, np.atleast_1d(t)) @ model.fit.b
    return float(vals[0]) if scalar else vals


def predict_proba(model: SflrModel, newdata: FunctionalDataset) -> np.ndarray:
    """Predicted class-1 probabilities for new curves on any in-domain grid."""
    U = compute_U(newdata, model.basis)
    return clamped_probs(model.fit.alpha + U @ model.fit.b, _PREDICT_CLAMP)


def classify(probabilities, threshold: float = 0.5) -> np.ndarray:
    """Hard labels; ties at the threshold go to class 1."""
    return (np.asarray(probabilities) >= threshold).astype(np.int64)


def null_regions(model: SflrModel) -> list[tuple[float, float]]:
    """Maximal runs of null-flagged subintervals as [start, end] pairs."""
    breaks = model.basis.breakpoints
    mask = model.fit.null_mask
    regions: list[tuple[float, float]] = []
    start = None
    for j, is_null in enumerate(mask):
        if is_null and start is None:
            start = breaks[j]
        elif not is_null and start is not None:
            regions.append((float(start), float(breaks[j])))
            start = None
    if start is not None:
        regions.append((float(start), float(breaks[-1])))
    return regions


def to_json(model: SflrModel) -> str:
    doc = {
        "domain": [model.basis.domain_start, model.basis.domain_end],
        "degree": model.basis.degree,
        "M": model.basis.interior_interval_count,
        "b": model.fit.b.tolist(),
        "alpha": model.fit.alpha,
        "null_mask": [bool(v) for v in model.fit.null_mask],
        "lambda": model.fit.lam,
        "gamma": model.fit.gamma,
        "m": model.m,
    }
    return json.dumps(doc, indent=2)


def save(model: SflrModel, path) -> None:
    Path(path).write_text(to_json(model))


def from_json(text: str) -> SflrModel:
    doc = json.loads(text)
    basis = make_basis(doc["domain"][1], doc["degree"], doc["M"])
    fit = FitResult(b=np.asarray(doc["b"], dtype=np.float64),
                    alpha=float(doc["alpha"]),
                    null_mask=np.asarray(doc["null_mask"], dtype=bool),
                    converged=True, lam=doc["lambda"], gamma=doc["gamma"])
    grid = np.array([doc["domain"][0], doc["domain"][1]])
    return SflrModel(basis=basis, fit=fit, training_grid=grid, m=doc["m"])


def load(path) -> SflrModel:
    return from_json(Path(path).read_text())
