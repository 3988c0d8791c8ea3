"""Distribution distances and interval estimates used by the comparison tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from .errors import InsufficientDataError, InvalidParameterError

__all__ = [
    "EmpiricalDistribution",
    "ks_distance",
    "wasserstein1",
    "mean_ci",
    "chi_square_gof",
]


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample kept as a float64 array."""

    values: np.ndarray

    def __post_init__(self):
        v = np.sort(np.asarray(self.values, dtype=np.float64).ravel())
        if v.size == 0:
            raise InsufficientDataError("empirical distribution needs at least one value")
        if not np.all(np.isfinite(v)):
            raise InvalidParameterError("sample values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    def cdf(self, x: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.values, np.asarray(x), side="right") / self.n


def _as_sorted(sample) -> np.ndarray:
    if isinstance(sample, EmpiricalDistribution):
        return sample.values
    v = np.sort(np.asarray(sample, dtype=np.float64).ravel())
    if v.size == 0:
        raise InsufficientDataError("empty sample")
    return v


def ks_distance(a, b) -> float:
    """Exact two-sample Kolmogorov-Smirnov distance.

    Evaluates both empirical CDFs at every point of the pooled sample and
    takes the max gap, so ties are handled exactly.
    """
    xa, xb = _as_sorted(a), _as_sorted(b)
    pooled = np.concatenate([xa, xb])
    pooled.sort(kind="mergesort")
    fa = np.searchsorted(xa, pooled, side="right") / xa.size
    fb = np.searchsorted(xb, pooled, side="right") / xb.size
    return float(np.max(np.abs(fa - fb)))


def wasserstein1(a, b) -> float:
    """Order-1 Wasserstein distance between two one-dimensional samples.

    Equal sizes reduce to the mean absolute difference of order statistics;
    otherwise the CDF-difference integral is computed exactly on the merged
    support (equivalent to the quantile-function integral).
    """
    xa, xb = _as_sorted(a), _as_sorted(b)
    if xa.size == xb.size:
        return float(np.mean(np.abs(xa - xb)))
    merged = np.concatenate([xa, xb])
    merged.sort(kind="mergesort")
    fa = np.searchsorted(xa, merged[:-1], side="right") / xa.size
    fb = np.searchsorted(xb, merged[:-1], side="right") / xb.size
    return float(np.sum(np.abs(fa - fb) * np.diff(merged)))


def mean_ci(samples, level: float = 0.95) -> tuple[float, float, float]:
    """Mean with a normal-approximation confidence interval.

    Returns (mean, lo, hi).  Raises InsufficientDataError for n < 2 since
    the sample standard deviation is undefined there.
    """
    v = np.asarray(samples, dtype=np.float64).ravel()
    if v.size < 2:
        raise InsufficientDataError(f"mean_ci needs n >= 2, got n = {v.size}")
    if not 0.0 < level < 1.0:
        raise InvalidParameterError(f"confidence level must be in (0, 1), got {level}")
    m = float(np.mean(v))
    se = float(np.std(v, ddof=1) / np.sqrt(v.size))
    z = float(sps.norm.ppf(0.5 * (1.0 + level)))
    return m, m - z * se, m + z * se


def chi_square_gof(observed, expected) -> tuple[float, float]:
    """Chi-square goodness-of-fit statistic and p-value for binned counts."""
    obs = np.asarray(observed, dtype=np.float64)
    exp = np.asarray(expected, dtype=np.float64)
    if obs.shape != exp.shape or obs.size < 2:
        raise InvalidParameterError("observed/expected must share a shape with >= 2 bins")
    if np.any(exp <= 0):
        raise InvalidParameterError("expected counts must be positive")
    stat = float(np.sum((obs - exp) ** 2 / exp))
    dof = obs.size - 1
    return stat, float(sps.chi2.sf(stat, dof))
