import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from severoscan.imagecore import (
    Histogram,
    ImageFormatError,
    dice_coefficient,
    histogram,
    load_image,
    mask_from_image,
    mask_to_image,
    masked_histogram,
    pixel_multiply,
    save_image,
)

small_images = arrays(
    np.uint8,
    st.tuples(st.integers(1, 12), st.integers(1, 12)),
    elements=st.integers(0, 255),
)


def test_histogram_counts_and_total():
    img = np.array([[0, 255], [0, 255]], dtype=np.uint8)
    h = histogram(img)
    assert h.counts[0] == 2
    assert h.counts[255] == 2
    assert h.counts.sum() == h.total == 4


def test_histogram_constant_image():
    img = np.full((10, 10), 7, dtype=np.uint8)
    h = histogram(img)
    assert h.counts[7] == 100
    assert h.counts.sum() == 100


def test_histogram_ramp_uniform_probabilities():
    img = np.arange(256, dtype=np.uint8).reshape(1, 256)
    h = histogram(img)
    assert (h.counts == 1).all()
    assert h.probabilities == pytest.approx(np.full(256, 1 / 256))


@given(small_images)
def test_histogram_total_is_pixel_count(img):
    assert histogram(img).total == img.size


def test_histogram_validation():
    with pytest.raises(ValueError):
        Histogram(np.zeros(255, dtype=np.int64))
    with pytest.raises(ValueError):
        Histogram(np.full(256, -1, dtype=np.int64))
    with pytest.raises(ValueError):
        Histogram(np.zeros(256, dtype=np.float64))
    empty = Histogram(np.zeros(256, dtype=np.int64))
    assert empty.total == 0
    assert (empty.probabilities == 0.0).all()


def test_masked_histogram_identity_and_empty():
    img = np.array([[0, 0], [255, 255]], dtype=np.uint8)
    full = masked_histogram(img, np.ones_like(img, dtype=bool))
    assert (full.counts == histogram(img).counts).all()
    none = masked_histogram(img, np.zeros_like(img, dtype=bool))
    assert none.total == 0
    sel = masked_histogram(img, img == 255)
    assert sel.counts[255] == 2 and sel.total == 2


def test_masked_histogram_shape_mismatch():
    img = np.zeros((2, 2), dtype=np.uint8)
    with pytest.raises(ValueError):
        masked_histogram(img, np.zeros((3, 2), dtype=bool))


def test_pgm_round_trip(tmp_path):
    img = np.array([[0, 255], [128, 64]], dtype=np.uint8)
    p = tmp_path / "t.pgm"
    save_image(img, p)
    back = load_image(p)
    assert back.dtype == np.uint8
    assert (back == img).all()
    # header layout is fixed
    assert p.read_bytes().startswith(b"P5\n2 2\n255\n")


def test_png_round_trip(tmp_path):
    img = (np.arange(64, dtype=np.uint8) * 4).reshape(8, 8)
    p = tmp_path / "t.png"
    save_image(img, p)
    assert (load_image(p) == img).all()


def test_load_sniffs_content_not_extension(tmp_path):
    img = np.array([[1, 2], [3, 4]], dtype=np.uint8)
    p = tmp_path / "mislabeled.png"
    save_image(img, tmp_path / "real.pgm")
    p.write_bytes((tmp_path / "real.pgm").read_bytes())
    assert (load_image(p) == img).all()


def test_pgm_comments_in_header(tmp_path):
    p = tmp_path / "c.pgm"
    p.write_bytes(b"P5\n# a comment\n2 # inline\n2\n255\n" + bytes([9, 8, 7, 6]))
    assert (load_image(p) == np.array([[9, 8], [7, 6]], dtype=np.uint8)).all()


def test_pgm_rejects_wrong_maxval(tmp_path):
    p = tmp_path / "deep.pgm"
    p.write_bytes(b"P5\n2 2\n65535\n" + bytes(8))
    with pytest.raises(ImageFormatError, match="maxval"):
        load_image(p)


def test_pgm_rejects_truncation_and_ascii_variant(tmp_path):
    p = tmp_path / "short.pgm"
    p.write_bytes(b"P5\n4 4\n255\n" + bytes(3))
    with pytest.raises(ImageFormatError, match="truncated"):
        load_image(p)
    p2 = tmp_path / "ascii.pgm"
    p2.write_bytes(b"P2\n1 1\n255\n0\n")
    with pytest.raises(ImageFormatError, match="P5"):
        load_image(p2)


def test_png_rejects_color(tmp_path):
    p = tmp_path / "rgb.png"
    Image.new("RGB", (4, 4), (10, 20, 30)).save(p)
    with pytest.raises(ImageFormatError, match="mode"):
        load_image(p)


def test_load_rejects_garbage_and_missing(tmp_path):
    p = tmp_path / "junk.pgm"
    p.write_bytes(b"not an image at all")
    with pytest.raises(ImageFormatError):
        load_image(p)
    with pytest.raises(ImageFormatError):
        load_image(tmp_path / "absent.pgm")


def test_save_rejects_unknown_suffix(tmp_path):
    with pytest.raises(ImageFormatError):
        save_image(np.zeros((2, 2), dtype=np.uint8), tmp_path / "x.bmp")


def test_pixel_multiply():
    img = np.array([[10, 20]], dtype=np.uint8)
    m = np.array([[True, False]])
    assert (pixel_multiply(img, m) == [[10, 0]]).all()
    all_true = np.ones_like(img, dtype=bool)
    assert (pixel_multiply(img, all_true) == img).all()
    all_false = np.zeros_like(img, dtype=bool)
    assert (pixel_multiply(img, all_false) == 0).all()


@given(small_images)
def test_pixel_multiply_idempotent_in_mask(img):
    m = img > 128
    once = pixel_multiply(img, m)
    assert (pixel_multiply(once, m) == once).all()


def test_mask_image_round_trip():
    m = np.array([[True, False], [False, True]])
    img = mask_to_image(m)
    assert set(np.unique(img)) <= {0, 255}
    assert (mask_from_image(img) == m).all()


def test_dice_coefficient():
    a = np.zeros((4, 4), dtype=bool)
    b = np.zeros((4, 4), dtype=bool)
    assert dice_coefficient(a, b) == 1.0  # both empty
    a[0, 0] = True
    assert dice_coefficient(a, b) == 0.0
    b[0, 0] = True
    assert dice_coefficient(a, a) == 1.0
    a[1, 1] = True
    # |A|=2, |B|=1, overlap 1
    assert dice_coefficient(a, b) == pytest.approx(2 / 3)


@given(small_images)
@settings(max_examples=40)
def test_dice_bounds_and_symmetry(img):
    a = img > 100
    b = img > 150
    d = dice_coefficient(a, b)
    assert 0.0 <= d <= 1.0
    assert d == dice_coefficient(b, a)
