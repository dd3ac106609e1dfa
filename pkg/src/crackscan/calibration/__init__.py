from .histogram import (
    bilinear_sample,
    build_histograms,
    entropy,
    mutual_information,
    nid,
)
from .nelder_mead import nelder_mead_minimize
from .refine import mean_nid, perturb, refine_extrinsic
from .schemas import (
    CalibrationConfig,
    CalibrationFrame,
    CalibrationResult,
    JointHistogram,
    NelderMeadConfig,
    NelderMeadResult,
)

__all__ = [
    "CalibrationConfig",
    "CalibrationFrame",
    "CalibrationResult",
    "JointHistogram",
    "NelderMeadConfig",
    "NelderMeadResult",
    "bilinear_sample",
    "build_histograms",
    "entropy",
    "mean_nid",
    "mutual_information",
    "nelder_mead_minimize",
    "nid",
    "perturb",
    "refine_extrinsic",
]
