"""Landscape heterogeneity metrics and error-curve utilities.

Two per-unit metrics generalize label-accuracy results beyond a particular
map: purity (target-class area fraction) for binary legends, and the
equivalent reference probability for multi-class legends, an
information-theoretic measure of how dominant the leading class is.  Error
rates binned against either metric form the curves that relate landscape
fragmentation to labelling reliability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .legends import Label

__all__ = [
    "BinnedCurve",
    "error_rate",
    "purity",
    "erp",
    "bin_errors",
    "local_regression_smooth",
]


@dataclass
class BinnedCurve:
    """Mean error per metric bin; ``mean_error`` is NaN where a bin is empty."""

    bin_centers: np.ndarray
    mean_error: np.ndarray
    counts: np.ndarray


def _label_values(labels) -> np.ndarray:
    return np.asarray([l.value if isinstance(l, Label) else l for l in labels])


def error_rate(true_labels, simulated_labels) -> float:
    """Fraction of disagreeing labels between two equal-length sequences.

    Labels compare on their value; tie flags are metadata and do not count
    as disagreement.
    """
    truth = _label_values(true_labels)
    sim = _label_values(simulated_labels)
    if truth.size == 0:
        raise ValueError("label lists must be non-empty")
    if truth.shape != sim.shape:
        raise ValueError(f"length mismatch: {truth.shape} vs {sim.shape}")
    return float(np.mean(truth != sim))


def purity(proportions, target_classes) -> float:
    """Summed proportion of the target classes within a unit."""
    targets = sorted(int(c) for c in target_classes)
    if not targets:
        raise ValueError("target class set must be non-empty")
    p = np.asarray(proportions, dtype=float)
    if targets[-1] >= p.size:
        raise ValueError(f"target class {targets[-1]} out of range for {p.size} classes")
    return float(p[targets].sum())


def erp(proportions) -> float:
    """Equivalent reference probability of a proportion vector.

    With ``p*`` the dominant proportion and ``E`` the expected difference of
    information ``ln p* - sum(p_i ln p_i, i != i*) / (1 - p*)``, the value is
    ``exp(E) / (exp(E) + k - 1)``.  It equals ``1/k`` for uniform proportions,
    grows with the dominance of the leading class, and reaches 1 in the pure
    case (taken as the limit, since ``E`` is singular at ``p* = 1``).
    """
    p = np.asarray(proportions, dtype=float)
    k = p.size
    if k < 2:
        raise ValueError(f"need at least two classes, got {k}")
    if np.any(p < 0) or abs(float(p.sum()) - 1.0) > 1e-6:
        raise ValueError("proportions must be non-negative and sum to 1")
    i_star = int(np.argmax(p))
    p_star = float(p[i_star])
    if p_star >= 1.0:
        return 1.0
    rest = np.delete(p, i_star)
    rest = rest[rest > 0.0]  # 0 * ln 0 contributes nothing
    expected_gain = math.log(p_star) - float(rest @ np.log(rest)) / (1.0 - p_star)
    e = math.exp(expected_gain)
    return e / (e + k - 1)


def bin_errors(metric_values, per_unit_errors, step: float = 0.05,
               origin: float = 0.0) -> BinnedCurve:
    """Group per-unit errors into metric bins of the given step.

    Bins are ``[origin + i*step, origin + (i+1)*step)`` with the last bin
    closed so a metric of exactly 1 is kept.  A non-zero ``origin`` (below
    one step) shifts the grid, e.g. to center bins on thresholds that would
    otherwise sit on bin edges; values under ``origin`` fall into the first
    bin.
    """
    metric = np.asarray(metric_values, dtype=float)
    errors = np.asarray(per_unit_errors, dtype=float)
    if metric.shape != errors.shape:
        raise ValueError(f"length mismatch: {metric.shape} vs {errors.shape}")
    if not 0.0 < step < 1.0:
        raise ValueError(f"step must be in (0, 1), got {step}")
    if not 0.0 <= origin < step:
        raise ValueError(f"origin must be in [0, step), got {origin}")
    n_bins = math.ceil(round((1.0 - origin) / step, 9))
    idx = np.clip(np.floor((metric - origin) / step).astype(int), 0, n_bins - 1)
    counts = np.bincount(idx, minlength=n_bins)
    sums = np.bincount(idx, weights=errors, minlength=n_bins)
    with np.errstate(invalid="ignore"):
        means = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    centers = origin + (np.arange(n_bins) + 0.5) * step
    return BinnedCurve(centers, means, counts)


def local_regression_smooth(x, y, span: float = 0.3, query_x=None) -> np.ndarray:
    """Tricube-weighted local linear smoother.

    Fits a degree-1 weighted least-squares line around each query point using
    the ``ceil(span * n)`` nearest neighbours, in a single pass with no
    robustness reweighting.  Returns the fitted values at ``query_x``
    (defaults to the sorted sample positions).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D arrays of equal length")
    if x.size < 5:
        raise ValueError(f"need at least 5 points, got {x.size}")
    if not 0.0 < span <= 1.0:
        raise ValueError(f"span must be in (0, 1], got {span}")
    query = np.sort(x) if query_x is None else np.asarray(query_x, dtype=float)

    m = min(x.size, max(3, math.ceil(span * x.size)))
    fitted = np.empty(query.shape)
    for i, q in enumerate(query.ravel()):
        d = np.abs(x - q)
        h = np.partition(d, m - 1)[m - 1]
        if h == 0.0:
            fitted.flat[i] = y[d == 0.0].mean()
            continue
        u = d / h
        w = np.where(u < 1.0, (1.0 - u ** 3) ** 3, 0.0)
        xc = x - q
        sw = w.sum()
        swx = w @ xc
        swy = w @ y
        swxx = w @ (xc * xc)
        swxy = w @ (xc * y)
        denom = sw * swxx - swx * swx
        if denom <= 1e-12 * max(sw * swxx, 1e-300):
            fitted.flat[i] = swy / sw
        else:
            # value of the local line at the query point (xc = 0)
            fitted.flat[i] = (swxx * swy - swx * swxy) / denom
    return fitted
