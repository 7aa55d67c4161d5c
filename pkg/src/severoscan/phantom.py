"""Synthetic CT slice generator with exact ground-truth masks.

A phantom slice holds two elliptic lung fields inside a bright elliptic
bone ring, with optional circular infection blobs inside the lungs. Band
intensities are fixed generator constants; Gaussian noise is added per band
and clamped so soft tissue always stays below the artifact cutoff and the
ring always stays above it. Ground-truth masks match the analytic shapes
exactly, before noise.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Ellipse",
    "Blob",
    "PhantomSpec",
    "PhantomTruth",
    "generate",
    "standard_spec",
    "patient_series",
]

BACKGROUND_MEAN, BACKGROUND_SIGMA = 0.0, 3.0
TISSUE_MEAN, TISSUE_SIGMA = 30.0, 8.0
INFECTION_MEAN, INFECTION_SIGMA = 120.0, 12.0
BONE_MEAN, BONE_SIGMA = 220.0, 10.0

# Soft tissue (lung, infection, background) is clamped below the default
# artifact cutoff of 184; the bone ring is clamped above 200, so the split
# is exact by construction.
SOFT_CLAMP_MAX = 183.0
BONE_CLAMP_MIN = 200.0

# A blob mean must sit at least five noise sigmas above lung tissue.
MIN_BLOB_MEAN = TISSUE_MEAN + 5.0 * INFECTION_SIGMA

MIN_BLOB_RADIUS = 12.0


@dataclass(frozen=True)
class Ellipse:
    """Axis-aligned ellipse: center (cx, cy), semi-axes (rx, ry) in pixels."""

    cx: float
    cy: float
    rx: float
    ry: float

    def contains(self, xx, yy):
        dx = (xx - self.cx) / self.rx
        dy = (yy - self.cy) / self.ry
        return dx * dx + dy * dy <= 1.0


@dataclass(frozen=True)
class Blob:
    """Circular infection region with its own band mean intensity."""

    cx: float
    cy: float
    radius: float
    mean: float = INFECTION_MEAN

    def contains(self, xx, yy):
        dx = xx - self.cx
        dy = yy - self.cy
        return dx * dx + dy * dy <= self.radius * self.radius


def _standard_lungs(width, height):
    return (
        Ellipse(0.324 * width, 0.5 * height, 0.146 * width, 0.254 * height),
        Ellipse(0.676 * width, 0.5 * height, 0.146 * width, 0.254 * height),
    )


def _ring_ellipses(width, height):
    outer = Ellipse(width / 2.0, height / 2.0, 0.45 * width, 0.38 * height)
    thickness = max(3.0, 0.02 * min(width, height))
    inner = Ellipse(outer.cx, outer.cy, outer.rx - thickness, outer.ry - thickness)
    return outer, inner


@dataclass(frozen=True)
class PhantomSpec:
    """Geometry and seed for one phantom slice.

    lung_ellipses defaults to the standard two-lung layout scaled to the
    image size. Blobs must lie inside the lungs and their means must clear
    the tissue band by five noise sigmas; both are enforced.
    """

    width: int = 512
    height: int = 512
    seed: int = 0
    lung_ellipses: tuple = None
    infection_blobs: tuple = ()

    def __post_init__(self):
        if self.width < 64 or self.height < 64:
            raise ValueError("phantom must be at least 64x64 pixels")
        lungs = self.lung_ellipses
        if lungs is None:
            lungs = _standard_lungs(self.width, self.height)
        lungs = tuple(lungs)
        if len(lungs) != 2:
            raise ValueError(f"expected exactly 2 lung ellipses, got {len(lungs)}")
        for e in lungs:
            if e.rx <= 0 or e.ry <= 0:
                raise ValueError(f"degenerate lung ellipse {e}")
        blobs = tuple(self.infection_blobs)
        for b in blobs:
            if b.radius <= 0:
                raise ValueError(f"degenerate infection blob {b}")
            if not MIN_BLOB_MEAN <= b.mean <= SOFT_CLAMP_MAX:
                raise ValueError(
                    f"blob mean {b.mean} outside [{MIN_BLOB_MEAN}, {SOFT_CLAMP_MAX}]"
                )
        object.__setattr__(self, "lung_ellipses", lungs)
        object.__setattr__(self, "infection_blobs", blobs)


@dataclass(frozen=True)
class PhantomTruth:
    """Generated slice plus its exact ground truth."""

    spec: PhantomSpec
    image: np.ndarray
    body_mask: np.ndarray
    lung_mask: np.ndarray
    infection_mask: np.ndarray
    true_infection_rate_percent: float


def generate(spec: PhantomSpec) -> PhantomTruth:
    """Render a phantom slice deterministically from its spec."""
    h, w = spec.height, spec.width
    yy, xx = np.mgrid[0:h, 0:w]

    lung = np.zeros((h, w), dtype=bool)
    for e in spec.lung_ellipses:
        lung |= e.contains(xx, yy)
    if not lung.any():
        raise ValueError("lung ellipses cover no pixels")

    outer, inner = _ring_ellipses(w, h)
    ring = outer.contains(xx, yy) & ~inner.contains(xx, yy)
    if (lung & ~inner.contains(xx, yy)).any():
        raise ValueError("lung ellipses extend into the artifact ring")

    infection = np.zeros((h, w), dtype=bool)
    for b in spec.infection_blobs:
        bmask = b.contains(xx, yy)
        if (bmask & ~lung).any():
            raise ValueError(f"infection blob {b} extends outside the lung ellipses")
        infection |= bmask

    rng = np.random.Generator(np.random.PCG64(spec.seed))
    img = rng.normal(BACKGROUND_MEAN, BACKGROUND_SIGMA, (h, w))
    tissue = rng.normal(TISSUE_MEAN, TISSUE_SIGMA, (h, w))
    blob_noise = rng.normal(0.0, INFECTION_SIGMA, (h, w))
    bone = rng.normal(BONE_MEAN, BONE_SIGMA, (h, w))

    img = np.where(lung, tissue, img)
    for b in spec.infection_blobs:
        img = np.where(b.contains(xx, yy), b.mean + blob_noise, img)
    img = np.where(ring, np.clip(bone, BONE_CLAMP_MIN, 255.0), np.clip(img, 0.0, SOFT_CLAMP_MAX))
    image = np.rint(img).astype(np.uint8)

    rate = 100.0 * np.count_nonzero(infection) / np.count_nonzero(lung)
    return PhantomTruth(
        spec=spec,
        image=image,
        body_mask=lung | ring,
        lung_mask=lung,
        infection_mask=infection,
        true_infection_rate_percent=float(rate),
    )


def _place_blob(rng, lung: Ellipse, radius, existing):
    """Sample a blob center so the whole disk fits inside the lung ellipse.

    In the ellipse norm ||(x, y)|| = sqrt((x/rx)^2 + (y/ry)^2) a unit step
    costs at most 1/min(rx, ry), so any center with norm <= 1 - r/min(rx, ry)
    keeps the full disk of radius r inside the ellipse.
    """
    scale = 1.0 - (radius + 2.0) / min(lung.rx, lung.ry)
    if scale <= 0:
        raise ValueError(f"blob radius {radius} does not fit in lung {lung}")
    for _ in range(200):
        a = rng.uniform(-1.0, 1.0)
        b = rng.uniform(-1.0, 1.0)
        if a * a + b * b > 1.0:
            continue
        cx = lung.cx + a * scale * lung.rx
        cy = lung.cy + b * scale * lung.ry
        if all(math.hypot(cx - o.cx, cy - o.cy) > radius + o.radius + 3.0 for o in existing):
            return Blob(cx, cy, float(radius))
    raise ValueError("could not place infection blob without overlap")


def standard_spec(seed, *, width=512, height=512, target_rate_percent=None, n_blobs=None) -> PhantomSpec:
    """Standard phantom with seeded blob placement.

    With a target rate, blob areas are sized so the true infection rate lands
    near the target (exact truth is always computed from the masks). Without
    one, 1..2 blobs of random size are placed. A target of zero (or
    n_blobs=0) produces a healthy slice.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    lungs = _standard_lungs(width, height)
    lung_area = 2.0 * math.pi * lungs[0].rx * lungs[0].ry
    max_radius = min(lungs[0].rx, lungs[0].ry) - 4.0

    radii = []
    if target_rate_percent is not None and target_rate_percent <= 0:
        n_blobs = 0
    if n_blobs == 0:
        pass
    elif target_rate_percent is None:
        n = int(n_blobs) if n_blobs is not None else int(rng.integers(1, 3))
        hi = max(MIN_BLOB_RADIUS, 0.45 * max_radius)
        for _ in range(n):
            radii.append(min(rng.uniform(MIN_BLOB_RADIUS, hi), max_radius))
    else:
        total_area = target_rate_percent / 100.0 * lung_area
        n = int(n_blobs) if n_blobs is not None else (1 if target_rate_percent <= 6.0 else 2)
        n = max(1, min(n, 2))
        weights = rng.uniform(0.8, 1.2, n)
        for share in weights / weights.sum():
            r = math.sqrt(share * total_area / math.pi)
            radii.append(min(max(r, MIN_BLOB_RADIUS), max_radius))

    blobs = []
    for i, r in enumerate(radii):
        host = lungs[i % 2] if len(radii) > 1 else lungs[int(rng.integers(2))]
        blobs.append(_place_blob(rng, host, r, blobs))
    return PhantomSpec(
        width=width,
        height=height,
        seed=seed,
        lung_ellipses=lungs,
        infection_blobs=tuple(blobs),
    )


def patient_series(seed, n_slices=10, *, width=512, height=512, target_rate_percent=None):
    """Deterministic list of phantom slices for one synthetic patient.

    Slice seeds and per-slice rate jitter derive from the patient seed, so a
    patient is fully reproducible.
    """
    if n_slices < 1:
        raise ValueError("a patient needs at least one slice")
    rng = np.random.Generator(np.random.PCG64(seed))
    slice_seeds = rng.integers(0, 2**31, size=n_slices)
    jitter = rng.uniform(0.85, 1.15, size=n_slices)
    truths = []
    for i in range(n_slices):
        target = None
        if target_rate_percent is not None:
            target = target_rate_percent * float(jitter[i])
        truths.append(
            generate(
                standard_spec(
                    int(slice_seeds[i]),
                    width=width,
                    height=height,
                    target_rate_percent=target,
                )
            )
        )
    return truths
