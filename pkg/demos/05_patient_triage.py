"""Batch analysis and triage: three synthetic patients through the CLI path.

Builds an input tree of phantom patients with known severity, runs the same
entry point the `severoscan analyze` command uses, and compares the ranking
against the ground truth.
"""

import json
from pathlib import Path

import numpy as np

from severoscan import cli, patient_series, save_image

root = Path("demo_output/05")
tree = root / "scans"
report_path = root / "report.json"

# Three patients at clearly separated severity levels, 4 slices each.
# patient_series jitters the per-slice rate around the target, like a real
# stack where slices catch more or less of the infected volume.
patients = {"alpha": (9001, 25.0), "bravo": (9002, 10.0), "charlie": (9003, 3.0)}
truth_means = {}
for pid, (seed, target) in patients.items():
    series = patient_series(seed, n_slices=4, target_rate_percent=target)
    pdir = tree / pid
    pdir.mkdir(parents=True, exist_ok=True)
    for j, truth in enumerate(series):
        save_image(truth.image, pdir / f"s{j}.pgm")
    truth_means[pid] = float(np.mean([t.true_infection_rate_percent for t in series]))

print("ground truth means:",
      {pid: f"{m:.2f}%" for pid, m in sorted(truth_means.items())})
print()

# cli.main is exactly what the console script runs; exit code 0 means every
# slice produced a score.
code = cli.main([
    "analyze",
    "--input", str(tree),
    "--output", str(report_path),
    "--overlay", str(root / "overlays"),
    "--jobs", "1",
])
assert code == 0

report = json.loads(report_path.read_text())
print()
for p in report["patients"]:
    measured = p["mean_infection_rate_percent"]
    print(f"rank {p['rank']}: {p['patient_id']:8s} measured {measured:6.2f}% "
          f"truth {truth_means[p['patient_id']]:6.2f}% "
          f"(error {abs(measured - truth_means[p['patient_id']]):.2f} pp)")

expected = sorted(truth_means, key=lambda pid: -truth_means[pid])
got = [p["patient_id"] for p in report["patients"]]
print()
print(f"triage order {'matches' if got == expected else 'DIFFERS FROM'} ground truth: {got}")
print(f"overlays and masks written under {root / 'overlays'}")
