"""Per-slice and per-patient infection severity scores and triage ranking."""

from dataclasses import dataclass, replace

import numpy as np

from .imagecore import _require_mask

__all__ = [
    "SliceReport",
    "PatientReport",
    "slice_severity",
    "patient_mean",
    "triage_rank",
    "format_rate",
]


@dataclass(frozen=True)
class SliceReport:
    """Severity numbers for one slice; rate is None when no lung was found."""

    slice_id: str
    infection_pixels: int
    lung_pixels: int
    infection_rate_percent: float
    thresholds: tuple = None
    objective: str = None
    objective_value: float = None
    flags: tuple = ()


@dataclass(frozen=True)
class PatientReport:
    """Aggregated severity for one patient; rank 0 means not yet ranked."""

    patient_id: str
    slices: tuple
    mean_infection_rate_percent: float
    rank: int = 0


def slice_severity(infection, lung, slice_id="", *, thresholds=None, objective=None, objective_value=None) -> SliceReport:
    """Score one slice: rate = 100 * |infection| / |lung|.

    The infection mask must be contained in the lung mask, and the lung mask
    must be nonempty. A slice with zero infected pixels is flagged
    "no_infection" and scores 0.0.
    """
    inf = _require_mask(infection)
    lng = _require_mask(lung, inf.shape)
    if (inf & ~lng).any():
        raise ValueError("infection mask extends outside the lung mask")
    lung_pixels = int(np.count_nonzero(lng))
    if lung_pixels == 0:
        raise ValueError("no lung detected")
    infection_pixels = int(np.count_nonzero(inf))
    rate = 100.0 * infection_pixels / lung_pixels
    flags = ("no_infection",) if infection_pixels == 0 else ()
    return SliceReport(
        slice_id=slice_id,
        infection_pixels=infection_pixels,
        lung_pixels=lung_pixels,
        infection_rate_percent=rate,
        thresholds=tuple(thresholds) if thresholds is not None else None,
        objective=objective,
        objective_value=objective_value,
        flags=flags,
    )


def patient_mean(patient_id: str, slices) -> PatientReport:
    """Arithmetic mean of the slice rates for one patient.

    Zero-infection slices count toward the mean; slices without a rate
    (no lung found) are excluded. Raises ValueError when no slice has a rate.
    """
    slices = tuple(slices)
    rates = [s.infection_rate_percent for s in slices if s.infection_rate_percent is not None]
    if not rates:
        raise ValueError("patient has no scorable slices")
    return PatientReport(
        patient_id=patient_id,
        slices=slices,
        mean_infection_rate_percent=sum(rates) / len(rates),
        rank=0,
    )


def triage_rank(patients) -> list:
    """Rank patients 1..n by descending mean rate; ties break by patient id.

    Patients without a mean (no scorable slices anywhere) sort after all
    scored patients.
    """
    def key(p: PatientReport):
        missing = p.mean_infection_rate_percent is None
        return (missing, 0.0 if missing else -p.mean_infection_rate_percent, p.patient_id)

    ordered = sorted(patients, key=key)
    return [replace(p, rank=i + 1) for i, p in enumerate(ordered)]


def format_rate(rate: float) -> str:
    """Human-readable percentage at two decimal places."""
    return f"{rate:.2f}"
