"""Histogram objectives scored by the multilevel threshold optimizer.

A threshold vector t = (t_1 < ... < t_k) with every t_j in [1, 254] cuts the
intensity axis into k+1 classes [t_j, t_{j+1}) using the sentinels t_0 = 0 and
t_{k+1} = 256, so a pixel value v lands in class j when t_j <= v < t_{j+1}.
Classes with zero probability mass contribute nothing to either objective.

Both objectives are computed from cumulative tables of the histogram's
probabilities, which keeps single evaluations and the exhaustive scans in
`harmonysearch` on the exact same floating-point path.
"""

import numpy as np

from .imagecore import Histogram

__all__ = [
    "MIN_LEVEL",
    "MAX_LEVEL",
    "MAX_THRESHOLDS",
    "validate_thresholds",
    "otsu_between_class",
    "kapur_entropy",
    "global_variance",
    "OBJECTIVES",
]

MIN_LEVEL = 1
MAX_LEVEL = 254
MAX_THRESHOLDS = 8


def validate_thresholds(levels) -> tuple:
    """Validate and normalize a threshold vector to a tuple of ints.

    Raises ValueError unless 1 <= k <= 8, every level is in [1, 254], and the
    levels are strictly increasing.
    """
    t = tuple(int(v) for v in levels)
    if not 1 <= len(t) <= MAX_THRESHOLDS:
        raise ValueError(f"threshold vector must have 1..{MAX_THRESHOLDS} levels, got {len(t)}")
    for v in t:
        if not MIN_LEVEL <= v <= MAX_LEVEL:
            raise ValueError(f"threshold {v} outside [{MIN_LEVEL}, {MAX_LEVEL}]")
    if any(a >= b for a, b in zip(t, t[1:])):
        raise ValueError(f"thresholds must be strictly increasing, got {t}")
    return t


def _tables(hist: Histogram):
    """Cumulative probability, first-moment, and p*ln(p) tables."""
    if hist.total == 0:
        raise ValueError("empty histogram: objectives need at least one counted pixel")
    p = hist.probabilities
    idx = np.arange(256, dtype=np.float64)
    plogp = np.zeros(256, dtype=np.float64)
    nz = p > 0.0
    plogp[nz] = p[nz] * np.log(p[nz])
    return np.cumsum(p), np.cumsum(idx * p), np.cumsum(plogp)


def _class_edges(table, cuts, j, k):
    """Cumulative table value at the upper edge of class j for each cut row."""
    if j < k:
        return table[cuts[:, j] - 1]
    return np.full(cuts.shape[0], table[255])


def _otsu_values(cum_p, cum_s, cuts) -> np.ndarray:
    """Between-class variance for each row of cut points (shape (n, k))."""
    n, k = cuts.shape
    mu_total = cum_s[255]
    acc = np.zeros(n, dtype=np.float64)
    low_p = np.zeros(n, dtype=np.float64)
    low_s = np.zeros(n, dtype=np.float64)
    for j in range(k + 1):
        hi_p = _class_edges(cum_p, cuts, j, k)
        hi_s = _class_edges(cum_s, cuts, j, k)
        w = hi_p - low_p
        s = hi_s - low_s
        mu = s / np.where(w > 0.0, w, 1.0)
        acc = acc + np.where(w > 0.0, w * (mu - mu_total) ** 2, 0.0)
        low_p = hi_p
        low_s = hi_s
    return acc


def _kapur_values(cum_p, cum_e, cuts) -> np.ndarray:
    """Summed per-class Kapur entropy for each row of cut points."""
    n, k = cuts.shape
    acc = np.zeros(n, dtype=np.float64)
    low_p = np.zeros(n, dtype=np.float64)
    low_e = np.zeros(n, dtype=np.float64)
    for j in range(k + 1):
        hi_p = _class_edges(cum_p, cuts, j, k)
        hi_e = _class_edges(cum_e, cuts, j, k)
        w = hi_p - low_p
        e = hi_e - low_e
        w_safe = np.where(w > 0.0, w, 1.0)
        # H_j = ln(w_j) - (sum p ln p)/w_j; clamp tiny negative rounding away.
        h = np.maximum(np.log(w_safe) - e / w_safe, 0.0)
        acc = acc + np.where(w > 0.0, h, 0.0)
        low_p = hi_p
        low_e = hi_e
    return acc


def otsu_between_class(hist: Histogram, levels) -> float:
    """Between-class variance sum(w_j * (mu_j - mu_total)^2) over the classes."""
    t = validate_thresholds(levels)
    cum_p, cum_s, _ = _tables(hist)
    cuts = np.asarray([t], dtype=np.int64)
    return float(_otsu_values(cum_p, cum_s, cuts)[0])


def kapur_entropy(hist: Histogram, levels) -> float:
    """Summed per-class entropy -sum((p_i/w_j) ln(p_i/w_j)); always >= 0."""
    t = validate_thresholds(levels)
    cum_p, _, cum_e = _tables(hist)
    cuts = np.asarray([t], dtype=np.int64)
    return float(_kapur_values(cum_p, cum_e, cuts)[0])


def global_variance(hist: Histogram) -> float:
    """Total intensity variance of the histogram (upper bound for Otsu)."""
    p = hist.probabilities
    idx = np.arange(256, dtype=np.float64)
    mu = float((idx * p).sum())
    return float((p * (idx - mu) ** 2).sum())


OBJECTIVES = {"otsu": otsu_between_class, "kapur": kapur_entropy}
