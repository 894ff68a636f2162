"""Degradation synthesis: binning-style downsample, CFA sampling, white Gaussian noise.

Noise sigmas are quoted on a 0-255 scale throughout and applied as sigma/255
on [0, 1] data. All randomness comes from numpy's Philox4x32-10 counter-based
generator so outputs are reproducible across runs and platforms; per-image
seeds are derived as ``seed ^ image_index``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bayer import BayerMosaic, ColorImage, PackedMosaic, mosaic_from_color, pack


@dataclass
class DegradationSpec:
    scale: int = 2
    sigma: float = 10.0
    seed: int = 0
    pattern: str = "RGGB"

    def __post_init__(self):
        if self.scale < 1:
            raise ValueError(f"scale must be >= 1, got {self.scale}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")


@dataclass
class DegradedPair:
    """One ground-truth image with all derived degraded views."""

    gt_hr_color: ColorImage
    gt_hr_packed: PackedMosaic
    lr_color: ColorImage
    lr_mosaic_clean: BayerMosaic
    lr_mosaic_noisy: BayerMosaic
    noise_map: np.ndarray  # constant sigma/255 at packed LR resolution
    spec: DegradationSpec


def rng_for(seed: int) -> np.random.Generator:
    """Philox4x32-10 generator; the project-wide seeding discipline."""
    return np.random.Generator(np.random.Philox(key=seed & (2**64 - 1)))


def derive_seed(seed: int, index: int) -> int:
    return (seed ^ index) & (2**64 - 1)


def downsample_avg(img: ColorImage, factor: int) -> ColorImage:
    """Pixel-averaging downsample: each output pixel is the mean of a
    factor x factor input block, per channel (hardware-binning surrogate)."""
    if factor < 1:
        raise ValueError(f"factor must be >= 1, got {factor}")
    if factor == 1:
        return ColorImage(planes=img.planes.copy())
    h, w = img.height, img.width
    if h % factor or w % factor:
        raise ValueError(f"dimensions {h}x{w} not divisible by factor {factor}")
    blocks = img.planes.reshape(3, h // factor, factor, w // factor, factor)
    out = blocks.mean(axis=(2, 4), dtype=np.float64)
    return ColorImage(planes=out.astype(img.planes.dtype))


def add_awgn(plane: np.ndarray, sigma255: float, seed: int) -> np.ndarray:
    """Add i.i.d. N(0, (sigma255/255)^2) noise, then clamp to [0, 1].

    Clamping mimics sensor saturation; it slightly truncates the Gaussian
    near 0 and 1. sigma255 = 0 returns the input unchanged.
    """
    if sigma255 < 0:
        raise ValueError(f"sigma255 must be >= 0, got {sigma255}")
    plane = np.asarray(plane)
    if sigma255 == 0:
        return plane.copy()
    noise = rng_for(seed).normal(0.0, sigma255 / 255.0, size=plane.shape)
    return np.clip(plane + noise, 0.0, 1.0).astype(plane.dtype)


def degrade(gt: ColorImage, spec: DegradationSpec) -> DegradedPair:
    """Synthesize the full degraded view set for one ground-truth image.

    Order is fixed: downsample -> CFA-sample -> add noise on the mosaic
    plane (sensor-domain noise).
    """
    if gt.height % (2 * spec.scale) or gt.width % (2 * spec.scale):
        raise ValueError(
            f"GT dimensions {gt.height}x{gt.width} must be divisible by "
            f"2*scale = {2 * spec.scale}"
        )
    lr_color = downsample_avg(gt, spec.scale)
    lr_clean = mosaic_from_color(lr_color, spec.pattern)
    lr_noisy = BayerMosaic(
        plane=add_awgn(lr_clean.plane, spec.sigma, spec.seed),
        pattern=spec.pattern,
    )
    gt_packed = pack(mosaic_from_color(gt, spec.pattern))
    noise_map = np.full(
        (lr_clean.height // 2, lr_clean.width // 2),
        spec.sigma / 255.0,
        dtype=lr_clean.plane.dtype,
    )
    return DegradedPair(
        gt_hr_color=gt,
        gt_hr_packed=gt_packed,
        lr_color=lr_color,
        lr_mosaic_clean=lr_clean,
        lr_mosaic_noisy=lr_noisy,
        noise_map=noise_map,
        spec=spec,
    )
