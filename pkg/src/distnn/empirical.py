"""Empirical one-dimensional distributions and their Wasserstein geometry.

An empirical distribution places mass 1/n on each of n observed samples. Its
quantile function is the right-continuous step function that equals the k-th
order statistic on the interval ((k-1)/n, k/n]. The squared 2-Wasserstein
distance between two distributions on the line is the integral over (0, 1) of
the squared difference of their quantile functions, which for step quantiles
reduces to exact sums. The Wasserstein barycenter of a collection is the
distribution whose quantile function is the arithmetic mean of the members'
quantile functions; for equal sample counts this is the coordinate-wise mean
of the order statistics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyCollectionError,
    EmptyInputError,
    NonFiniteSampleError,
    OutOfDomainError,
    SizeMismatchError,
)

__all__ = [
    "EmpiricalDistribution",
    "QuantileGrid",
    "StepQuantile",
    "from_samples",
    "w2_equal_n",
    "w2_general",
    "w2sq",
    "barycenter",
    "step_barycenter",
    "general_barycenter",
    "summaries",
]

_EPS = np.finfo(float).eps


def _order_index(t, n):
    """Map levels t in (0, 1) to order-statistic ranks k = ceil(t*n).

    Products t*n within a few ulps of an integer are snapped to that integer
    so that levels written as k/n land on the k-th order statistic despite
    floating-point rounding.
    """
    tn = np.asarray(t, dtype=float) * n
    nearest = np.rint(tn)
    snap = np.abs(tn - nearest) <= 4.0 * _EPS * np.maximum(1.0, np.abs(tn))
    k = np.where(snap, nearest, np.ceil(tn)).astype(np.int64)
    return np.clip(k, 1, n)


def _check_levels(levels):
    levels = np.asarray(levels, dtype=float)
    if levels.ndim != 1 or levels.size == 0:
        raise OutOfDomainError("levels must be a non-empty 1-D array")
    if np.any(~np.isfinite(levels)) or np.any((levels <= 0.0) | (levels >= 1.0)):
        raise OutOfDomainError("levels must lie strictly inside (0, 1)")
    if np.any(np.diff(levels) <= 0.0):
        raise OutOfDomainError("levels must be strictly increasing")
    return levels


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    """Sorted sample array carrying mass 1/n per atom.

    Construct through :func:`from_samples`; the stored array is sorted
    ascending and marked read-only.
    """

    samples: np.ndarray

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    def quantile(self, t):
        """Step quantile: the k-th order statistic with k = ceil(t*n), t in (0,1)."""
        t = np.asarray(t, dtype=float)
        if np.any(~np.isfinite(t)) or np.any((t <= 0.0) | (t >= 1.0)):
            raise OutOfDomainError("quantile level must lie in (0, 1)")
        out = self.samples[_order_index(t, self.n) - 1]
        return float(out) if out.ndim == 0 else out

    def step_edges(self) -> np.ndarray:
        """Breakpoints k/n, k = 1..n, of the step quantile function."""
        return np.arange(1, self.n + 1, dtype=float) / self.n

    def step_values(self) -> np.ndarray:
        return self.samples

    def mean(self) -> float:
        return float(np.mean(self.samples))

    def std(self) -> float:
        """Population standard deviation (divide by n)."""
        return float(np.std(self.samples))

    def var_at_risk(self, alpha: float) -> float:
        """Value-at-risk: the (1 - alpha) step quantile of the negated samples."""
        negated = _presorted(-self.samples[::-1])
        return negated.quantile(_check_alpha_complement(alpha))

    def __repr__(self):
        return f"EmpiricalDistribution(n={self.n})"


def _presorted(sorted_samples: np.ndarray) -> EmpiricalDistribution:
    arr = np.asarray(sorted_samples, dtype=float)
    arr.setflags(write=False)
    return EmpiricalDistribution(arr)


def _check_alpha_complement(alpha):
    if not (0.0 < alpha < 1.0):
        raise OutOfDomainError("alpha must lie in (0, 1)")
    return 1.0 - alpha


def from_samples(raw) -> EmpiricalDistribution:
    """Build an empirical distribution from raw samples in any order.

    Raises EmptyInputError for empty input and NonFiniteSampleError if any
    value is NaN or infinite.
    """
    arr = np.asarray(raw, dtype=float)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if arr.size == 0:
        raise EmptyInputError("sample array is empty")
    if np.any(~np.isfinite(arr)):
        raise NonFiniteSampleError("sample array contains NaN or infinite values")
    out = np.sort(arr, kind="stable")
    out.setflags(write=False)
    return EmpiricalDistribution(out)


@dataclass(frozen=True, eq=False)
class QuantileGrid:
    """A quantile function sampled on a strictly increasing grid in (0, 1)."""

    levels: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        levels = _check_levels(self.levels)
        values = np.asarray(self.values, dtype=float)
        if values.shape != levels.shape:
            raise SizeMismatchError("levels and values must have equal length")
        if np.any(np.diff(values) < 0.0):
            raise OutOfDomainError("quantile values must be non-decreasing")
        levels.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True, eq=False)
class StepQuantile:
    """Piecewise-constant quantile function, exact on (0, 1].

    ``edges`` are strictly increasing breakpoints in (0, 1] ending at 1;
    ``values[l]`` is the function value on (edges[l-1], edges[l]] with
    edges[-1] read as 0. Equivalently a discrete measure with atom
    ``values[l]`` of mass ``edges[l] - edges[l-1]``.
    """

    edges: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if edges.ndim != 1 or edges.size == 0 or edges.shape != values.shape:
            raise SizeMismatchError("edges and values must be equal-length 1-D arrays")
        if edges[-1] != 1.0 or np.any(edges <= 0.0) or np.any(np.diff(edges) <= 0.0):
            raise OutOfDomainError("edges must increase strictly within (0, 1] and end at 1")
        if np.any(np.diff(values) < 0.0):
            raise OutOfDomainError("quantile values must be non-decreasing")
        edges.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "values", values)

    def quantile(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(~np.isfinite(t)) or np.any((t <= 0.0) | (t >= 1.0)):
            raise OutOfDomainError("quantile level must lie in (0, 1)")
        out = self.values[np.searchsorted(self.edges, t, side="left")]
        return float(out) if out.ndim == 0 else out

    def step_edges(self) -> np.ndarray:
        return self.edges

    def step_values(self) -> np.ndarray:
        return self.values

    def weights(self) -> np.ndarray:
        return np.diff(np.concatenate(([0.0], self.edges)))

    def mean(self) -> float:
        return float(np.sum(self.weights() * self.values))

    def std(self) -> float:
        w = self.weights()
        m = np.sum(w * self.values)
        return float(np.sqrt(max(0.0, np.sum(w * self.values**2) - m * m)))

    def var_at_risk(self, alpha: float) -> float:
        t = _check_alpha_complement(alpha)
        atoms = -self.values[::-1]
        cum = np.cumsum(self.weights()[::-1])
        cum[-1] = 1.0
        return float(atoms[np.searchsorted(cum, t, side="left")])

    def __repr__(self):
        return f"StepQuantile(pieces={self.edges.shape[0]})"


def _merged_step_eval(a, b):
    """Widths and values of two step quantile functions on their merged grid."""
    edges = np.union1d(a.step_edges(), b.step_edges())
    widths = np.diff(np.concatenate(([0.0], edges)))
    mids = edges - 0.5 * widths
    va = a.step_values()[np.searchsorted(a.step_edges(), mids, side="left")]
    vb = b.step_values()[np.searchsorted(b.step_edges(), mids, side="left")]
    return widths, va, vb


def w2sq(a, b) -> float:
    """Squared 2-Wasserstein distance between two step-quantile carriers.

    Accepts EmpiricalDistribution and StepQuantile in any combination; exact
    integration over the merged breakpoint grid, with an order-statistic fast
    path when both are empirical with equal n.
    """
    if (
        isinstance(a, EmpiricalDistribution)
        and isinstance(b, EmpiricalDistribution)
        and a.n == b.n
    ):
        return float(np.mean((a.samples - b.samples) ** 2))
    widths, va, vb = _merged_step_eval(a, b)
    return float(np.sum(widths * (va - vb) ** 2))


def w2_equal_n(a: EmpiricalDistribution, b: EmpiricalDistribution) -> float:
    """W2 between equal-size empirical distributions: the RMS order-statistic gap."""
    if a.n != b.n:
        raise SizeMismatchError(f"sample counts differ: {a.n} != {b.n}")
    return float(np.sqrt(np.mean((a.samples - b.samples) ** 2)))


def w2_general(a, b) -> float:
    """W2 via exact integration of the quantile difference; sizes may differ."""
    return float(np.sqrt(w2sq(a, b)))


def barycenter(ds) -> EmpiricalDistribution:
    """Wasserstein barycenter of equal-size empirical distributions.

    The k-th order statistic of the result is the mean of the members' k-th
    order statistics.
    """
    ds = list(ds)
    if not ds:
        raise EmptyCollectionError("barycenter of an empty collection")
    n = ds[0].n
    if any(d.n != n for d in ds):
        raise SizeMismatchError(
            "equal-size barycenter requires uniform sample counts; "
            "use step_barycenter or general_barycenter for ragged collections"
        )
    stacked = np.vstack([d.samples for d in ds])
    return _presorted(stacked.mean(axis=0))


def step_barycenter(ds) -> StepQuantile:
    """Exact Wasserstein barycenter of empirical distributions of any sizes.

    The mean of step quantile functions is itself a step function on the
    merged breakpoint grid of the members.
    """
    ds = list(ds)
    if not ds:
        raise EmptyCollectionError("barycenter of an empty collection")
    edges = ds[0].step_edges()
    for d in ds[1:]:
        edges = np.union1d(edges, d.step_edges())
    widths = np.diff(np.concatenate(([0.0], edges)))
    mids = edges - 0.5 * widths
    acc = np.zeros_like(edges)
    for d in ds:
        acc += d.step_values()[np.searchsorted(d.step_edges(), mids, side="left")]
    return StepQuantile(edges, acc / len(ds))


def general_barycenter(ds, levels) -> QuantileGrid:
    """Barycenter quantile function sampled on a grid: the mean of member quantiles."""
    ds = list(ds)
    if not ds:
        raise EmptyCollectionError("barycenter of an empty collection")
    levels = _check_levels(levels)
    values = np.zeros_like(levels)
    for d in ds:
        values += np.asarray(d.quantile(levels), dtype=float)
    return QuantileGrid(levels, values / len(ds))


def summaries(d, var_alpha: float = 0.05) -> dict:
    """Mean, median, population std, and VaR(alpha) of a distribution.

    VaR is the (1 - alpha) quantile of the negated variable, so for a
    degenerate distribution at c it equals -c.
    """
    if not (0.0 < var_alpha < 1.0):
        raise OutOfDomainError("var_alpha must lie in (0, 1)")
    return {
        "mean": d.mean(),
        "median": float(d.quantile(0.5)),
        "std": d.std(),
        "var_at_risk": d.var_at_risk(var_alpha),
    }
