"""Intensity split of a CT slice into soft tissue and high-density artifacts.

Bone and other bright scanner artifacts sit above a fixed intensity cutoff;
everything below it is kept as the lung-bearing soft-tissue layer. The two
output layers partition the original pixel values.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .imagecore import _require_image

__all__ = ["FilterConfig", "BACKGROUND_FLOOR", "split_artifact", "body_mask"]

# Pixels at or below this intensity are treated as scanner background when
# building the body mask.
BACKGROUND_FLOOR = 5


@dataclass(frozen=True)
class FilterConfig:
    """Configuration for the artifact split.

    artifact_threshold: intensities >= this value are routed to the artifact
    layer. Pixels exactly at the threshold count as artifact.
    """

    artifact_threshold: int = 184

    def __post_init__(self):
        t = self.artifact_threshold
        if not isinstance(t, int) or not 1 <= t <= 255:
            raise ValueError(f"artifact_threshold must be an integer in [1, 255], got {t!r}")


def split_artifact(img, config: FilterConfig = FilterConfig()):
    """Split an image into (lung_section, artifact_section).

    Each pixel keeps its value in exactly one of the two outputs and is zero
    in the other: values below the threshold go to the lung section, values
    at or above it go to the artifact section.
    """
    arr = _require_image(img)
    is_artifact = arr >= config.artifact_threshold
    zero = np.uint8(0)
    lung_section = np.where(is_artifact, zero, arr)
    artifact_section = np.where(is_artifact, arr, zero)
    return lung_section, artifact_section


def body_mask(img, config: FilterConfig = FilterConfig()) -> np.ndarray:
    """Mask of body content: pixels above the background floor, despeckled.

    A single opening with the unit cross removes isolated noise pixels that
    clear the floor. The erosion treats outside the image as body so a mask
    reaching the border keeps its frame; the dilation treats it as background
    so nothing bleeds inward.
    """
    arr = _require_image(img)
    raw = arr > BACKGROUND_FLOOR
    eroded = ndimage.binary_erosion(raw, border_value=1)
    return ndimage.binary_dilation(eroded)
