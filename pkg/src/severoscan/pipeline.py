"""End-to-end slice and patient analysis behind the command line front end.

Per slice: split off bright artifacts, find the lung field, optimize a
threshold vector on the lung-restricted histogram, extract the infected
region by watershed, and score it. Patients are the subdirectories of the
input tree; their slices are the PGM/PNG files inside, analyzed in sorted
order. Every slice gets an independent search seed derived from the run seed
and the slice id, so reports are byte-identical across runs and worker
counts.
"""

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._version import __version__
from .harmonysearch import HarmonyParams, hso_maximize
from .imagecore import ImageFormatError, load_image, masked_histogram, mask_to_image, pixel_multiply, save_image
from .segmentation import NoLungDetectedError, SegmentationConfig, extract_infection, lung_mask
from .severity import PatientReport, SliceReport, patient_mean, slice_severity, triage_rank
from .thresholdfilter import FilterConfig, split_artifact

__all__ = [
    "AnalysisConfig",
    "InvalidInputError",
    "stable_slice_seed",
    "analyze_slice",
    "analyze_patient",
    "analyze_tree",
    "build_report",
    "write_report",
]

SLICE_SUFFIXES = (".pgm", ".png")


class InvalidInputError(ValueError):
    """Raised when the input tree or one of its files is unusable."""


@dataclass(frozen=True)
class AnalysisConfig:
    """Resolved knobs for one analysis run; all of them land in the report."""

    objective: str = "otsu"
    thresholds: int = 3
    artifact_threshold: int = 184
    hms: int = 20
    hmcr: float = 0.9
    par: float = 0.3
    bw: int = 2
    iters: int = 2000
    seed: int = 0
    min_component_fraction: float = 0.001
    morph_radius: int = 2

    def __post_init__(self):
        if self.objective not in ("otsu", "kapur"):
            raise ValueError(f"objective must be 'otsu' or 'kapur', got {self.objective!r}")
        # Delegate range checks to the component configs.
        self.filter_config()
        self.segmentation_config()
        self.harmony_params(0)

    def filter_config(self) -> FilterConfig:
        return FilterConfig(artifact_threshold=self.artifact_threshold)

    def segmentation_config(self) -> SegmentationConfig:
        return SegmentationConfig(
            min_component_fraction=self.min_component_fraction,
            morph_radius=self.morph_radius,
        )

    def harmony_params(self, slice_seed: int) -> HarmonyParams:
        return HarmonyParams(
            hms=self.hms,
            hmcr=self.hmcr,
            par=self.par,
            bw=self.bw,
            max_improvisations=self.iters,
            k=self.thresholds,
            seed=slice_seed,
        )

    def report_config(self) -> dict:
        return {
            "version": __version__,
            "objective": self.objective,
            "thresholds": self.thresholds,
            "artifact_threshold": self.artifact_threshold,
            "hms": self.hms,
            "hmcr": self.hmcr,
            "par": self.par,
            "bw": self.bw,
            "iters": self.iters,
            "seed": self.seed,
            "min_component_fraction": self.min_component_fraction,
            "morph_radius": self.morph_radius,
        }


def stable_slice_seed(seed: int, slice_id: str) -> int:
    """Per-slice search seed: run seed XOR a stable 64-bit hash of the id."""
    digest = hashlib.blake2b(slice_id.encode("utf-8"), digest_size=8).digest()
    return (int(seed) ^ int.from_bytes(digest, "big")) & 0xFFFFFFFFFFFFFFFF


def analyze_slice(img, slice_id: str, cfg: AnalysisConfig = AnalysisConfig()):
    """Run the full per-slice chain; returns (SliceReport, infection mask).

    Raises NoLungDetectedError when the slice has no usable lung field.
    """
    lung_section, _ = split_artifact(img, cfg.filter_config())
    seg_cfg = cfg.segmentation_config()
    lung = lung_mask(lung_section, seg_cfg)
    hist = masked_histogram(lung_section, lung)
    result = hso_maximize(
        hist, cfg.objective, cfg.harmony_params(stable_slice_seed(cfg.seed, slice_id))
    )
    infection = extract_infection(lung_section, lung, result.best, seg_cfg)
    report = slice_severity(
        infection,
        lung,
        slice_id,
        thresholds=result.best,
        objective=cfg.objective,
        objective_value=result.best_value,
    )
    return report, infection


def _no_lung_report(slice_id: str) -> SliceReport:
    return SliceReport(
        slice_id=slice_id,
        infection_pixels=0,
        lung_pixels=0,
        infection_rate_percent=None,
        thresholds=None,
        objective=None,
        objective_value=None,
        flags=("no_lung",),
    )


def analyze_patient(patient_id: str, slices, cfg: AnalysisConfig = AnalysisConfig()):
    """Analyze (slice_id, image) pairs for one patient.

    Returns (PatientReport, dict of slice_id -> infection mask). Slices with
    no detectable lung are flagged and excluded from the patient mean; a
    patient whose slices all lack a lung gets a None mean.
    """
    reports = []
    masks = {}
    for slice_id, img in slices:
        try:
            report, infection = analyze_slice(img, slice_id, cfg)
        except NoLungDetectedError:
            report = _no_lung_report(slice_id)
            infection = np.zeros(np.asarray(img).shape, dtype=bool)
        reports.append(report)
        masks[slice_id] = infection
    try:
        patient = patient_mean(patient_id, reports)
    except ValueError:
        patient = PatientReport(
            patient_id=patient_id,
            slices=tuple(reports),
            mean_infection_rate_percent=None,
            rank=0,
        )
    return patient, masks


def _slice_task(task):
    """Worker: load, analyze, optionally write overlay and mask files."""
    path, patient_id, slice_id, cfg, overlay_dir = task
    img = load_image(path)
    try:
        report, infection = analyze_slice(img, slice_id, cfg)
    except NoLungDetectedError:
        report = _no_lung_report(slice_id)
        infection = np.zeros(img.shape, dtype=bool)
    if overlay_dir is not None:
        out = Path(overlay_dir) / patient_id
        out.mkdir(parents=True, exist_ok=True)
        stem = Path(path).stem
        save_image(pixel_multiply(img, infection), out / f"{stem}_overlay.pgm")
        save_image(mask_to_image(infection), out / f"{stem}_infection_mask.pgm")
    return patient_id, report


def _discover(input_dir: Path):
    """Sorted (path, patient_id, slice_id) triples for the input tree."""
    if not input_dir.is_dir():
        raise InvalidInputError(f"input directory not found: {input_dir}")
    patient_dirs = sorted((d for d in input_dir.iterdir() if d.is_dir()), key=lambda d: d.name)
    if not patient_dirs:
        raise InvalidInputError(f"no patient directories under {input_dir}")
    tasks = []
    for pdir in patient_dirs:
        files = sorted(
            (f for f in pdir.iterdir() if f.is_file() and f.suffix.lower() in SLICE_SUFFIXES),
            key=lambda f: f.name,
        )
        if not files:
            raise InvalidInputError(f"patient directory {pdir} contains no .pgm or .png slices")
        for f in files:
            tasks.append((f, pdir.name, f"{pdir.name}/{f.stem}"))
    return tasks


def analyze_tree(input_dir, cfg: AnalysisConfig = AnalysisConfig(), *, jobs=None, overlay_dir=None):
    """Analyze every patient under input_dir; returns (report dict, exit code).

    Exit code 0 means clean, 3 means at least one slice had no detectable
    lung (the report is still complete). Bad inputs raise InvalidInputError
    or ImageFormatError instead.
    """
    triples = _discover(Path(input_dir))
    if overlay_dir is not None:
        Path(overlay_dir).mkdir(parents=True, exist_ok=True)
        overlay_dir = str(overlay_dir)
    tasks = [(str(p), pid, sid, cfg, overlay_dir) for p, pid, sid in triples]

    workers = jobs if jobs else os.cpu_count() or 1
    workers = max(1, min(int(workers), len(tasks)))
    if workers == 1:
        results = [_slice_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_slice_task, tasks))

    by_patient = {}
    for patient_id, report in results:
        by_patient.setdefault(patient_id, []).append(report)

    patients = []
    for patient_id, reports in by_patient.items():
        try:
            patients.append(patient_mean(patient_id, reports))
        except ValueError:
            patients.append(
                PatientReport(
                    patient_id=patient_id,
                    slices=tuple(reports),
                    mean_infection_rate_percent=None,
                    rank=0,
                )
            )
    ranked = triage_rank(patients)

    no_lung = any("no_lung" in s.flags for p in ranked for s in p.slices)
    return build_report(cfg, ranked), (3 if no_lung else 0)


def build_report(cfg: AnalysisConfig, ranked_patients) -> dict:
    """Assemble the JSON-ready report dict in a fixed key order."""
    return {
        "config": cfg.report_config(),
        "patients": [
            {
                "patient_id": p.patient_id,
                "rank": p.rank,
                "mean_infection_rate_percent": p.mean_infection_rate_percent,
                "slices": [
                    {
                        "slice_id": s.slice_id,
                        "lung_pixels": s.lung_pixels,
                        "infection_pixels": s.infection_pixels,
                        "infection_rate_percent": s.infection_rate_percent,
                        "thresholds": list(s.thresholds) if s.thresholds is not None else None,
                        "objective": s.objective,
                        "objective_value": s.objective_value,
                        "flags": list(s.flags),
                    }
                    for s in p.slices
                ],
            }
            for p in ranked_patients
        ],
    }


def write_report(report: dict, path) -> None:
    """Serialize the report as stable, byte-reproducible JSON."""
    text = json.dumps(report, indent=2) + "\n"
    Path(path).write_text(text, encoding="utf-8", newline="\n")
