"""Infected-region extraction, step by step, scored against phantom truth.

The extractor seeds on the highest-intensity threshold class inside the lung,
grows the seed to the gradient ridge with a marker watershed, then cleans the
mask up. Running the steps by hand shows what each one contributes.
"""

from pathlib import Path

from severoscan import (
    AnalysisConfig,
    HarmonyParams,
    analyze_slice,
    class_map,
    dice_coefficient,
    extract_infection,
    generate,
    hso_maximize,
    lung_mask,
    mask_to_image,
    masked_histogram,
    save_image,
    split_artifact,
    standard_spec,
)

out = Path("demo_output/04")
out.mkdir(parents=True, exist_ok=True)

truth = generate(standard_spec(33, target_rate_percent=14.0))
cfg = AnalysisConfig()

# Step 1: drop the bright artifacts, keep the lung section.
lung_section, _ = split_artifact(truth.image, cfg.filter_config())

# Step 2: mask the lung fields.
lung = lung_mask(lung_section)
print(f"lung mask: {int(lung.sum())} pixels "
      f"(Dice vs truth {dice_coefficient(lung, truth.lung_mask):.4f})")

# Step 3: optimize thresholds on the lung-restricted histogram.
hist = masked_histogram(lung_section, lung)
run = hso_maximize(hist, "otsu", HarmonyParams(k=3, seed=33))
print(f"thresholds {run.best} at variance {run.best_value:.2f}")

# The seed is wherever the top class shows up inside the lung; the watershed
# then refines its boundary along the intensity gradient.
classes = class_map(lung_section, run.best)
seed = (classes == classes[lung].max()) & lung
print(f"raw seed: {int(seed.sum())} pixels "
      f"(truth region: {int(truth.infection_mask.sum())})")

# Step 4: the full extractor (watershed, smoothing, hole filling, size floor).
infection = extract_infection(lung_section, lung, run.best, cfg.segmentation_config())
dice = dice_coefficient(infection, truth.infection_mask)
rate = 100.0 * infection.sum() / lung.sum()
print(f"extracted {int(infection.sum())} pixels, rate {rate:.2f}% "
      f"(truth {truth.true_infection_rate_percent:.2f}%), Dice {dice:.4f}")

save_image(mask_to_image(infection), out / "infection_mask.pgm")

# analyze_slice wires the same steps together; its search seed derives from
# the slice id rather than the 33 used above, so the cuts can differ while
# the measured rate stays put.
report, _ = analyze_slice(truth.image, "demo/s0", cfg)
print(f"analyze_slice: rate {report.infection_rate_percent:.2f}%, "
      f"thresholds {report.thresholds}, flags {list(report.flags)}")
