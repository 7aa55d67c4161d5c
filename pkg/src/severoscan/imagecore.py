"""Grayscale image and mask primitives shared by the rest of the package.

Images are 2-D numpy arrays of dtype uint8 (row major, intensities 0..255).
Binary masks are 2-D bool arrays of the same shape. File I/O covers binary
PGM (P5, maxval 255) and 8-bit grayscale PNG; anything else is rejected
rather than converted.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

__all__ = [
    "ImageFormatError",
    "Histogram",
    "load_image",
    "save_image",
    "histogram",
    "masked_histogram",
    "pixel_multiply",
    "mask_to_image",
    "mask_from_image",
    "dice_coefficient",
]

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


class ImageFormatError(ValueError):
    """Raised when a file cannot be read or written as 8-bit grayscale."""


def _require_image(img) -> np.ndarray:
    arr = np.asarray(img)
    if arr.ndim != 2 or arr.dtype != np.uint8:
        raise ValueError("expected a 2-D uint8 image array")
    if arr.size == 0:
        raise ValueError("image has zero pixels")
    return arr


def _require_mask(mask, shape=None) -> np.ndarray:
    arr = np.asarray(mask)
    if arr.ndim != 2 or arr.dtype != np.bool_:
        raise ValueError("expected a 2-D bool mask array")
    if shape is not None and arr.shape != shape:
        raise ValueError(f"mask shape {arr.shape} does not match image shape {shape}")
    return arr


@dataclass(frozen=True)
class Histogram:
    """256-bin intensity histogram with exact integer counts."""

    counts: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.counts)
        if arr.shape != (256,):
            raise ValueError("histogram must have exactly 256 bins")
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError("histogram counts must be integers")
        if (arr < 0).any():
            raise ValueError("histogram counts must be non-negative")
        object.__setattr__(self, "counts", arr.astype(np.int64))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def probabilities(self) -> np.ndarray:
        """Bin probabilities as float64; all zeros for an empty histogram."""
        total = self.total
        if total == 0:
            return np.zeros(256, dtype=np.float64)
        return self.counts / float(total)


def load_image(path) -> np.ndarray:
    """Load a binary PGM (P5) or 8-bit grayscale PNG file.

    Color images, palette images, and bit depths other than 8 raise
    ImageFormatError; they are never silently converted.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ImageFormatError(f"{path}: cannot read file ({exc})") from exc
    if data[:2] == b"P5":
        return _parse_pgm(data, path)
    if data[:len(_PNG_MAGIC)] == _PNG_MAGIC:
        return _load_png(path)
    if data[:1] == b"P" and data[1:2] in b"123467":
        raise ImageFormatError(
            f"{path}: only binary PGM (P5) is supported, got magic {data[:2].decode('ascii', 'replace')!r}"
        )
    raise ImageFormatError(f"{path}: not a PGM or PNG file")


def _parse_pgm(data: bytes, path) -> np.ndarray:
    pos = 2
    fields = []
    while len(fields) < 3:
        # Skip whitespace and '#' comment lines between header tokens.
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        token = data[start:pos]
        if not token.isdigit():
            raise ImageFormatError(f"{path}: malformed PGM header")
        fields.append(int(token))
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise ImageFormatError(f"{path}: invalid dimensions {width}x{height}")
    if maxval != 255:
        raise ImageFormatError(
            f"{path}: unsupported maxval {maxval} (only 8-bit data with maxval 255)"
        )
    pos += 1  # single whitespace byte after maxval
    raster = data[pos : pos + width * height]
    if len(raster) < width * height:
        raise ImageFormatError(f"{path}: truncated pixel data")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()


def _load_png(path) -> np.ndarray:
    with Image.open(path) as im:
        if im.mode != "L":
            raise ImageFormatError(
                f"{path}: PNG mode {im.mode!r} is unsupported (only 8-bit grayscale, mode 'L')"
            )
        arr = np.asarray(im, dtype=np.uint8)
    if arr.size == 0:
        raise ImageFormatError(f"{path}: image has zero pixels")
    return arr


def save_image(img, path) -> None:
    """Write an image as binary PGM (.pgm) or 8-bit grayscale PNG (.png)."""
    arr = _require_image(img)
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".pgm":
        height, width = arr.shape
        header = f"P5\n{width} {height}\n255\n".encode("ascii")
        path.write_bytes(header + arr.tobytes())
    elif suffix == ".png":
        Image.fromarray(arr, mode="L").save(path)
    else:
        raise ImageFormatError(f"{path}: unsupported output format {suffix!r}")


def histogram(img) -> Histogram:
    """Intensity histogram over every pixel of the image."""
    arr = _require_image(img)
    counts = np.bincount(arr.ravel(), minlength=256)
    return Histogram(counts)


def masked_histogram(img, mask) -> Histogram:
    """Intensity histogram restricted to pixels where the mask is true."""
    arr = _require_image(img)
    m = _require_mask(mask, arr.shape)
    counts = np.bincount(arr[m], minlength=256)
    return Histogram(counts)


def pixel_multiply(img, mask) -> np.ndarray:
    """Keep image intensities where the mask is true, zero elsewhere."""
    arr = _require_image(img)
    m = _require_mask(mask, arr.shape)
    return np.where(m, arr, np.uint8(0))


def mask_to_image(mask) -> np.ndarray:
    """Render a binary mask as a 0/255 grayscale image."""
    m = _require_mask(mask)
    return np.where(m, np.uint8(255), np.uint8(0))


def mask_from_image(img) -> np.ndarray:
    """Binary mask that is true wherever the image is nonzero."""
    arr = _require_image(img)
    return arr > 0


def dice_coefficient(a, b) -> float:
    """Dice overlap 2|A∩B| / (|A|+|B|); two empty masks count as identical."""
    ma = _require_mask(a)
    mb = _require_mask(b, ma.shape)
    total = int(np.count_nonzero(ma)) + int(np.count_nonzero(mb))
    if total == 0:
        return 1.0
    inter = int(np.count_nonzero(ma & mb))
    return 2.0 * inter / total
