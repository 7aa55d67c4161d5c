"""Artifact removal: split a slice into its lung section and artifact section.

CT slices carry high-intensity content that is not lung tissue (bone,
implants, scanner table). A fixed cutoff separates the slice into two images
that add back up to the original; only the lung section moves on through the
pipeline.
"""

from pathlib import Path

import numpy as np

from severoscan import FilterConfig, body_mask, generate, save_image, split_artifact, standard_spec

out = Path("demo_output/02")
out.mkdir(parents=True, exist_ok=True)

truth = generate(standard_spec(11, target_rate_percent=8.0))
img = truth.image

lung_section, artifact_section = split_artifact(img, FilterConfig())
save_image(lung_section, out / "lung_section.pgm")
save_image(artifact_section, out / "artifact_section.pgm")

# The two sections partition the slice exactly: every pixel keeps its value
# in exactly one of them.
assert ((lung_section.astype(int) + artifact_section.astype(int)) == img).all()
print(f"split at >= {FilterConfig().artifact_threshold}: "
      f"{np.count_nonzero(artifact_section)} artifact pixels, "
      f"max lung-section intensity {lung_section.max()}")

# On the phantom the bone ring is clamped above the cutoff and everything
# else below it, so the artifact section is exactly the ring.
ring = truth.body_mask & ~truth.lung_mask
assert ((artifact_section > 0) == ring).all()
print(f"artifact section matches the phantom bone ring ({int(ring.sum())} pixels)")

# body_mask is the cheap brightness-based body outline used by the lung
# masker: everything above the background floor, despeckled.
body = body_mask(lung_section)
print(f"body mask covers {int(body.sum())} pixels "
      f"(phantom lungs: {int(truth.lung_mask.sum())})")
