"""Class maps and class-mean requantization for threshold vectors."""

import numpy as np

from .imagecore import Histogram, _require_image
from .objectives import validate_thresholds

__all__ = ["class_map", "quantize"]


def _class_lut(levels) -> np.ndarray:
    """Per-intensity class index: value v lands in class j when t_j <= v < t_{j+1}."""
    t = np.asarray(levels, dtype=np.int64)
    return np.searchsorted(t, np.arange(256), side="right").astype(np.uint8)


def class_map(img, levels) -> np.ndarray:
    """Map every pixel to its class index 0..k under the threshold vector."""
    arr = _require_image(img)
    t = validate_thresholds(levels)
    return _class_lut(t)[arr]


def quantize(img, levels, hist: Histogram) -> np.ndarray:
    """Replace every pixel by the rounded mean intensity of its class.

    Class means come from the supplied histogram (the one the thresholds were
    optimized on), so requantization is consistent with the search even when
    the image contains pixels outside the histogram's support. A class with
    no histogram mass falls back to its interval midpoint.
    """
    arr = _require_image(img)
    t = validate_thresholds(levels)
    counts = hist.counts.astype(np.float64)
    idx = np.arange(256, dtype=np.float64)
    bounds = (0,) + t + (256,)
    reps = np.empty(len(t) + 1, dtype=np.float64)
    for j in range(len(t) + 1):
        a, b = bounds[j], bounds[j + 1]
        mass = counts[a:b].sum()
        if mass > 0.0:
            reps[j] = np.rint((idx[a:b] * counts[a:b]).sum() / mass)
        else:
            reps[j] = (a + b) // 2
    lut = reps[_class_lut(t)].astype(np.uint8)
    return lut[arr]
