from .linear import SicMode, detect_mmse, detect_sic, detect_zf
from .ml import MAX_CANDIDATES, EnumerationLimitError, candidate_count, detect_ml
from .results import DetectionResult, slice_estimate

__all__ = [
    "MAX_CANDIDATES",
    "DetectionResult",
    "EnumerationLimitError",
    "SicMode",
    "candidate_count",
    "detect_ml",
    "detect_mmse",
    "detect_sic",
    "detect_zf",
    "slice_estimate",
]
