"""Tuning-parameter selection over (lambda, gamma) grids by BIC, AIC, or CV."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .basis import BSplineBasis
from .design import DesignMatrices, FunctionalDataset, build_design, compute_U
from .solver import FitResult, SolverConfig, clamped_probs, fit

CRITERIA = ("bic", "aic", "cv")


def worker_count() -> int:
    env = os.environ.get("SFLR_THREADS", "")
    if env.isdigit() and int(env) > 0:
        return int(env)
    return os.cpu_count() or 1


@dataclass(frozen=True)
class TuningGrid:
    lambdas: tuple[float, ...]
    gammas: tuple[float, ...]
    criterion: str = "bic"
    folds: int = 5
    cv_loss: str = "deviance"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(float(v) for v in self.lambdas))
        object.__setattr__(self, "gammas", tuple(float(v) for v in self.gammas))
        if not self.lambdas or not self.gammas:
            raise ValueError("tuning grids must be nonempty")
        if self.criterion not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}")
        if self.criterion == "cv" and self.folds < 2:
            raise ValueError("CV needs at least 2 folds")
        if self.cv_loss not in ("deviance", "mcr"):
            raise ValueError("cv_loss must be 'deviance' or 'mcr'")


@dataclass
class TuningResult:
    best_lambda: float
    best_gamma: float
    table: list[dict] = field(repr=False)
    best_fit: FitResult | None = None


def score_ic(fit_result: FitResult, N: int, criterion: str) -> float:
    """BIC or AIC from a converged fit's log-likelihood and effective df."""
    if not fit_result.converged:
        raise ValueError("information criteria require a converged fit")
    penalty = math.log(N) if criterion == "bic" else 2.0
    return -2.0 * fit_result.loglik + penalty * fit_result.df


def stratified_folds(labels: np.ndarray, k: int, seed: int) -> list[np.ndarray]:
    """Seeded stratified k-fold index sets (class proportions preserved)."""
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for cls in (0, 1):
        idx = np.flatnonzero(labels == cls)
        rng.shuffle(idx)
        for pos, i in enumerate(idx):
            folds[pos % k].append(int(i))
    return [np.sort(np.array(f, dtype=np.int64)) for f in folds]


def _deviance(y: np.ndarray, p: np.ndarray) -> float:
    return float(np.mean(-2.0 * (y * np.log(p) + (1 - y) * np.log1p(-p))))


def _cv_score(data: FunctionalDataset, basis: BSplineBasis,
              design: DesignMatrices, grid: TuningGrid,
              config: SolverConfig) -> float:
    y = np.asarray(data.labels, dtype=np.float64)
    U = compute_U(data, basis)
    folds = stratified_folds(np.asarray(data.labels), grid.folds, grid.seed)
    losses = []
    for val_idx in folds:
        train_mask = np.ones(data.n_samples, dtype=bool)
        train_mask[val_idx] = False
        res = fit(U[train_mask], y[train_mask], basis, design, config)
        if not res.converged:
            return math.inf
        p = clamped_probs(res.alpha + U[val_idx] @ res.b,
                          config.prob_clamp_delta)
        if grid.cv_loss == "deviance":
            losses.append(_deviance(y[val_idx], p))
        else:
            losses.append(float(np.mean((p >= 0.5) != (y[val_idx] == 1))))
    return float(np.mean(losses))


def tune(data: FunctionalDataset, basis: BSplineBasis, grid: TuningGrid,
         config: SolverConfig) -> TuningResult:
    """Fit every grid pair and pick the score minimizer.

    Ties break toward larger lambda, then larger gamma. Non-converged or
    failing grid points score +inf instead of raising.
    """
    if data.labels is None:
        raise ValueError("tuning requires labeled data")
    labels = np.asarray(data.labels)
    if labels.min() == labels.max():
        raise ValueError("tuning requires both classes present")

    design = build_design(data, basis, config.m)
    U, y = design.U, labels.astype(np.float64)
    pairs = [(lam, gam) for lam in grid.lambdas for gam in grid.gammas]

    def evaluate(pair):
        lam, gam = pair
        cfg = replace(config, lam=lam, gamma=gam)
        try:
            if grid.criterion == "cv":
                return _cv_score(data, basis, design, grid, cfg), None
            res = fit(U, y, basis, design, cfg)
            if not res.converged:
                return math.inf, res
            return score_ic(res, data.n_samples, grid.criterion), res
        except (ValueError, np.linalg.LinAlgError):
            return math.inf, None

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        results = list(pool.map(evaluate, pairs))

    table = [{"lambda": lam, "gamma": gam, "criterion": grid.criterion,
              "score": score,
              "converged": bool(score != math.inf)}
             for (lam, gam), (score, _) in zip(pairs, results)]

    order = sorted(range(len(pairs)),
                   key=lambda i: (results[i][0], -pairs[i][0], -pairs[i][1]))
    best = order[0]
    if results[best][0] == math.inf:
        raise RuntimeError("no tuning grid point converged")
    return TuningResult(best_lambda=pairs[best][0], best_gamma=pairs[best][1],
                        table=table, best_fit=results[best][1])


def score_table_csv(result: TuningResult) -> str:
    lines = ["lambda,gamma,criterion,score,converged"]
    for row in result.table:
        lines.append(f"{row['lambda']!r},{row['gamma']!r},{row['criterion']},"
                     f"{row['score']!r},{row['converged']}")
    return "\n".join(lines) + "\n"
