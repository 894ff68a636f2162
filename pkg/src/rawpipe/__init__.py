"""rawpipe: raw Bayer processing toolkit.

Degradation synthesis, classical denoise/SR/demosaic stage operators with a
pipeline-order ablation harness, a pixel-shift ground-truth simulator, PSNR
and SSIM metrics, and a small trainable joint denoise+SR+demosaic network.
"""

from .bayer import BayerMosaic, ColorImage, PackedMosaic, mosaic_from_color, pack, unpack
from .classical import (
    demosaic_bilinear,
    demosaic_malvar,
    denoise_gaussian,
    denoise_wiener,
    sr_bicubic,
)
from .degrade import DegradationSpec, DegradedPair, add_awgn, degrade, downsample_avg
from .metrics import MetricsReport, psnr, ssim
from .pipeline import (
    OrderingReport,
    PipelineError,
    PipelineSpec,
    StageOperator,
    ablate_orders,
    make_pipeline,
    run,
    validate,
)
from .pixelshift import capture_shifts, merge_shifts

__version__ = "0.1.0"

__all__ = [
    "BayerMosaic",
    "ColorImage",
    "DegradationSpec",
    "DegradedPair",
    "MetricsReport",
    "OrderingReport",
    "PackedMosaic",
    "PipelineError",
    "PipelineSpec",
    "StageOperator",
    "ablate_orders",
    "add_awgn",
    "capture_shifts",
    "degrade",
    "demosaic_bilinear",
    "demosaic_malvar",
    "denoise_gaussian",
    "denoise_wiener",
    "downsample_avg",
    "make_pipeline",
    "merge_shifts",
    "mosaic_from_color",
    "pack",
    "psnr",
    "run",
    "sr_bicubic",
    "ssim",
    "unpack",
    "validate",
]
