"""Datasets on a shared grid and the design/penalty matrices built from them."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import BSplineBasis, eval_basis_many, gram_block


@dataclass(frozen=True)
class FunctionalDataset:
    """Curves sampled on one strictly increasing grid, optionally labeled.

    values[i] is sample i on ``grid``; labels, when present, are 0/1.
    """

    grid: np.ndarray
    values: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=np.float64)
        values = np.atleast_2d(np.asarray(self.values, dtype=np.float64))
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if grid.ndim != 1 or grid.size < 2:
            raise ValueError("grid must be 1-D with at least 2 points")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if values.shape[1] != grid.size:
            raise ValueError(f"values have {values.shape[1]} columns but the "
                             f"grid has {grid.size} points")
        if self.labels is not None:
            labels = np.asarray(self.labels)
            object.__setattr__(self, "labels", labels)
            if labels.shape != (values.shape[0],):
                raise ValueError("labels length must equal the number of rows")
            if not np.isin(labels, [0, 1]).all():
                raise ValueError("labels must be 0 or 1")

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_points(self) -> int:
        return self.grid.size


@dataclass(frozen=True)
class DesignMatrices:
    """U (integrated design), V (roughness Gram of order m), per-interval W blocks."""

    U: np.ndarray
    V: np.ndarray
    W_blocks: list[np.ndarray] = field(repr=False)
    m: int = 2


def trapezoid_weights(grid: np.ndarray) -> np.ndarray:
    """Composite-trapezoid quadrature weights for a (possibly uneven) grid."""
    d = np.diff(grid)
    w = np.zeros_like(grid)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w


def compute_U(data: FunctionalDataset, basis: BSplineBasis) -> np.ndarray:
    """Integrated design matrix: row i approximates the integral of x_i
    against each basis function, by composite trapezoid on the data grid."""
    if data.n_samples == 0:
        raise ValueError("dataset has no samples")
    if data.grid[0] < basis.domain_start or data.grid[-1] > basis.domain_end:
        raise ValueError("data grid extends outside the basis domain")
    E = eval_basis_many(basis, data.grid)
    w = trapezoid_weights(data.grid)
    return (data.values * w) @ E


def compute_V(basis: BSplineBasis, m: int) -> np.ndarray:
    """Roughness Gram matrix: integral of outer products of m-th derivatives."""
    if not 1 <= m <= basis.degree - 1:
        raise ValueError(f"derivative order m={m} outside [1, {basis.degree - 1}]")
    V = sum(gram_block(basis, j, m)
            for j in range(1, basis.interior_interval_count + 1))
    return 0.5 * (V + V.T)


def compute_W_blocks(basis: BSplineBasis) -> list[np.ndarray]:
    """Order-0 Gram block for each subinterval (used by the sparsity penalty)."""
    return [gram_block(basis, j, 0)
            for j in range(1, basis.interior_interval_count + 1)]


def build_design(data: FunctionalDataset, basis: BSplineBasis, m: int = 2) -> DesignMatrices:
    return DesignMatrices(U=compute_U(data, basis), V=compute_V(basis, m),
                          W_blocks=compute_W_blocks(basis), m=m)
