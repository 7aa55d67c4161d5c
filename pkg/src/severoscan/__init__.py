"""Infected-region scoring for lung CT slices.

Pipeline: artifact threshold filtering, harmony-search multilevel
thresholding of the lung histogram, watershed extraction of the infected
region, and a per-slice/per-patient severity score used for triage.
"""

from ._version import __version__
from .harmonysearch import HarmonyParams, SearchResult, exhaustive_best, hso_maximize, repair
from .imagecore import (
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
from .objectives import (
    OBJECTIVES,
    global_variance,
    kapur_entropy,
    otsu_between_class,
    validate_thresholds,
)
from .phantom import Blob, Ellipse, PhantomSpec, PhantomTruth, generate, patient_series, standard_spec
from .pipeline import (
    AnalysisConfig,
    InvalidInputError,
    analyze_patient,
    analyze_slice,
    analyze_tree,
    build_report,
    stable_slice_seed,
    write_report,
)
from .quantize import class_map, quantize
from .segmentation import (
    NoLungDetectedError,
    SegmentationConfig,
    extract_infection,
    fill_holes,
    lung_mask,
    morph_open_close,
    sobel_edges,
    watershed,
)
from .severity import (
    PatientReport,
    SliceReport,
    format_rate,
    patient_mean,
    slice_severity,
    triage_rank,
)
from .thresholdfilter import BACKGROUND_FLOOR, FilterConfig, body_mask, split_artifact

__all__ = [
    "__version__",
    "AnalysisConfig",
    "BACKGROUND_FLOOR",
    "Blob",
    "Ellipse",
    "FilterConfig",
    "HarmonyParams",
    "Histogram",
    "ImageFormatError",
    "InvalidInputError",
    "NoLungDetectedError",
    "OBJECTIVES",
    "PatientReport",
    "PhantomSpec",
    "PhantomTruth",
    "SearchResult",
    "SegmentationConfig",
    "SliceReport",
    "analyze_patient",
    "analyze_slice",
    "analyze_tree",
    "body_mask",
    "build_report",
    "class_map",
    "dice_coefficient",
    "exhaustive_best",
    "extract_infection",
    "fill_holes",
    "format_rate",
    "generate",
    "global_variance",
    "histogram",
    "hso_maximize",
    "kapur_entropy",
    "load_image",
    "lung_mask",
    "mask_from_image",
    "mask_to_image",
    "masked_histogram",
    "morph_open_close",
    "otsu_between_class",
    "patient_mean",
    "patient_series",
    "pixel_multiply",
    "quantize",
    "repair",
    "save_image",
    "slice_severity",
    "sobel_edges",
    "split_artifact",
    "stable_slice_seed",
    "standard_spec",
    "triage_rank",
    "validate_thresholds",
    "watershed",
    "write_report",
]
