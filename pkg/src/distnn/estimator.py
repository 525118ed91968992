"""Nearest-neighbor imputation of distributions in a partially observed matrix.

To impute cell (i, j): measure each candidate row u (observed in column j) by
the average squared Wasserstein distance to row i over the columns, other
than j, observed in both rows; keep rows within a threshold eta; return the
Wasserstein barycenter of the neighbors' column-j entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .empirical import barycenter, step_barycenter, summaries, w2sq
from .errors import NoNeighborsError, OutOfDomainError
from .matrix import DistributionalMatrix, shared_columns

__all__ = [
    "NeighborSet",
    "ImputationResult",
    "ImputationBatch",
    "row_distance",
    "find_neighbors",
    "impute",
    "impute_all",
]


@dataclass(frozen=True, eq=False)
class NeighborSet:
    """Rows accepted as neighbors of a target cell, with their distances.

    Members are listed in row-index order. Rows with no shared columns
    (infinite distance) never appear.
    """

    target_row: int
    target_col: int
    eta: float
    rows: np.ndarray
    distances: np.ndarray
    overlap_counts: np.ndarray

    @property
    def size(self) -> int:
        return self.rows.shape[0]


@dataclass(frozen=True, eq=False)
class ImputationResult:
    """Estimated distribution for one cell plus neighbor diagnostics."""

    estimate: object  # EmpiricalDistribution or StepQuantile
    neighbors: NeighborSet
    summaries: dict
    var_alpha: float


@dataclass(frozen=True)
class ImputationBatch:
    """Per-cell outcomes of a batch imputation; failures never abort the batch."""

    results: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)


def row_distance(m: DistributionalMatrix, i: int, u: int, exclude: int, min_overlap: int = 1) -> float:
    """Average squared W2 between rows i and u over shared columns, excluding one.

    Returns math.inf when fewer than ``min_overlap`` shared columns exist
    (in particular when there are none).
    """
    cols = shared_columns(m, i, u, exclude)
    if cols.shape[0] < max(1, min_overlap):
        return math.inf
    total = 0.0
    for v in cols:
        total += w2sq(m.entry(i, v), m.entry(u, v))
    return total / cols.shape[0]


def _distance_profile(m, i, j, min_overlap):
    """Distances rho(i, u) and overlap counts for every row u != i."""
    n_rows = m.n_rows
    dists = np.full(n_rows, math.inf)
    overlaps = np.zeros(n_rows, dtype=np.int64)
    for u in range(n_rows):
        if u == i:
            continue
        cols = shared_columns(m, i, u, j)
        overlaps[u] = cols.shape[0]
        if cols.shape[0] >= max(1, min_overlap):
            total = 0.0
            for v in cols:
                total += w2sq(m.entry(i, v), m.entry(u, v))
            dists[u] = total / cols.shape[0]
    return dists, overlaps


def find_neighbors(
    m: DistributionalMatrix,
    i: int,
    j: int,
    eta: float,
    min_overlap: int = 1,
    max_neighbors: int | None = None,
) -> NeighborSet:
    """Rows u != i observed in column j with finite rho(i, u) <= eta.

    ``max_neighbors`` optionally keeps only the closest rows (ties broken by
    row index); useful for capping the neighborhood to a fixed size.
    """
    if eta < 0.0:
        raise OutOfDomainError("eta must be non-negative")
    m._check_index(i, j)
    dists, overlaps = _distance_profile(m, i, j, min_overlap)
    eligible = m.mask[:, j].copy()
    eligible[i] = False
    accept = eligible & np.isfinite(dists) & (dists <= eta)
    rows = np.nonzero(accept)[0]
    if max_neighbors is not None and rows.shape[0] > max_neighbors:
        order = np.argsort(dists[rows], kind="stable")[:max_neighbors]
        rows = np.sort(rows[order])
    return NeighborSet(
        target_row=i,
        target_col=j,
        eta=float(eta),
        rows=rows,
        distances=dists[rows],
        overlap_counts=overlaps[rows],
    )


def _barycenter_of(entries):
    sizes = {d.n for d in entries}
    if len(sizes) == 1:
        return barycenter(entries)
    return step_barycenter(entries)


def impute(
    m: DistributionalMatrix,
    i: int,
    j: int,
    eta: float,
    var_alpha: float = 0.05,
    min_overlap: int = 1,
    max_neighbors: int | None = None,
) -> ImputationResult:
    """Estimate the distribution at (i, j) as the neighbors' barycenter in column j.

    Raises :class:`NoNeighborsError` when no row qualifies; callers may retry
    with a larger eta. The target's own samples, when observed, never enter
    the estimate.
    """
    neighbors = find_neighbors(m, i, j, eta, min_overlap, max_neighbors)
    if neighbors.size == 0:
        raise NoNeighborsError(i, j, eta)
    entries = [m.entry(u, j) for u in neighbors.rows]
    estimate = _barycenter_of(entries)
    return ImputationResult(
        estimate=estimate,
        neighbors=neighbors,
        summaries=summaries(estimate, var_alpha),
        var_alpha=var_alpha,
    )


def impute_all(
    m: DistributionalMatrix,
    eta,
    var_alpha: float = 0.05,
    missing_only: bool = True,
    min_overlap: int = 1,
    max_neighbors: int | None = None,
) -> ImputationBatch:
    """Impute every target cell independently.

    ``eta`` is either a scalar threshold or a mapping from (row, col) to a
    per-target threshold. Cells without neighbors are recorded in
    ``failures`` and never abort the batch.
    """
    targets = m.missing_cells() if missing_only else [
        (i, j) for i in range(m.n_rows) for j in range(m.n_cols)
    ]
    batch = ImputationBatch()
    for cell in targets:
        cell_eta = eta[cell] if isinstance(eta, dict) else eta
        try:
            batch.results[cell] = impute(
                m, cell[0], cell[1], cell_eta, var_alpha, min_overlap, max_neighbors
            )
        except NoNeighborsError as exc:
            batch.failures[cell] = str(exc)
    return batch
