import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from severoscan.thresholdfilter import BACKGROUND_FLOOR, FilterConfig, body_mask, split_artifact


def test_config_validation():
    assert FilterConfig().artifact_threshold == 184
    FilterConfig(artifact_threshold=1)
    FilterConfig(artifact_threshold=255)
    for bad in (0, 256, -5, 3.5, "184"):
        with pytest.raises(ValueError):
            FilterConfig(artifact_threshold=bad)


def test_split_boundary_assignment():
    img = np.array([[0, 183, 184, 255]], dtype=np.uint8)
    lung, artifact = split_artifact(img, FilterConfig())
    assert (lung == [[0, 183, 0, 0]]).all()
    assert (artifact == [[0, 0, 184, 255]]).all()


def test_split_threshold_255_keeps_almost_everything():
    img = np.array([[0, 100, 254]], dtype=np.uint8)
    lung, artifact = split_artifact(img, FilterConfig(artifact_threshold=255))
    assert (lung == img).all()
    assert not artifact.any()


@given(
    arrays(np.uint8, st.tuples(st.integers(1, 16), st.integers(1, 16)), elements=st.integers(0, 255)),
    st.integers(1, 255),
)
def test_split_is_a_partition(img, threshold):
    lung, artifact = split_artifact(img, FilterConfig(artifact_threshold=threshold))
    # each pixel's value lands in exactly one side, and they rebuild the image
    assert (lung.astype(np.int32) + artifact.astype(np.int32) == img).all()
    assert not (lung.astype(bool) & artifact.astype(bool)).any()


@given(
    arrays(np.uint8, st.tuples(st.integers(1, 16), st.integers(1, 16)), elements=st.integers(0, 255)),
    st.integers(1, 254),
)
def test_split_monotone_in_threshold(img, threshold):
    lo, _ = split_artifact(img, FilterConfig(artifact_threshold=threshold))
    hi, _ = split_artifact(img, FilterConfig(artifact_threshold=threshold + 1))
    assert np.count_nonzero(hi) >= np.count_nonzero(lo)


def test_body_mask_trivial_cases():
    assert not body_mask(np.zeros((8, 8), dtype=np.uint8)).any()
    assert body_mask(np.full((8, 8), 200, dtype=np.uint8)).all()


def test_body_mask_floor_and_despeckle():
    img = np.zeros((16, 16), dtype=np.uint8)
    img[2, 2] = BACKGROUND_FLOOR  # at the floor: background
    img[4, 4] = BACKGROUND_FLOOR + 1  # isolated pixel above it: despeckled
    img[8:13, 8:13] = 40  # a real block survives
    m = body_mask(img)
    assert not m[2, 2]
    assert not m[4, 4]
    assert m[9:12, 9:12].all()


def test_body_mask_tracks_phantom_body(healthy_phantom):
    truth = healthy_phantom
    m = body_mask(truth.image)
    true_area = truth.body_mask.sum()
    assert abs(int(m.sum()) - int(true_area)) <= 0.01 * true_area
