"""PSNR and SSIM on [0, 1] color images."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .bayer import ColorImage

PSNR_CAP_DB = 99.0

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def psnr(a: ColorImage, b: ColorImage) -> float:
    """10*log10(1/MSE) with peak 1.0 over all channels and pixels.

    Identical (or numerically indistinguishable) images return the 99 dB cap.
    """
    if a.planes.shape != b.planes.shape:
        raise ValueError(f"shape mismatch: {a.planes.shape} vs {b.planes.shape}")
    diff = a.planes.astype(np.float64) - b.planes.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(PSNR_CAP_DB, 10.0 * np.log10(1.0 / mse))


def _ssim_window() -> np.ndarray:
    half = SSIM_WINDOW // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-0.5 * (x / SSIM_SIGMA) ** 2)
    return g / g.sum()


def _filter_valid(a: np.ndarray, g: np.ndarray) -> np.ndarray:
    # separable valid-mode correlation (no padding)
    out = np.tensordot(sliding_window_view(a, len(g), axis=0), g, axes=([-1], [0]))
    return np.tensordot(sliding_window_view(out, len(g), axis=1), g, axes=([-1], [0]))


def ssim_plane(x: np.ndarray, y: np.ndarray) -> float:
    x = x.astype(np.float64)
    y = y.astype(np.float64)
    g = _ssim_window()
    c1 = (SSIM_K1 * 1.0) ** 2
    c2 = (SSIM_K2 * 1.0) ** 2
    mu_x = _filter_valid(x, g)
    mu_y = _filter_valid(y, g)
    var_x = _filter_valid(x * x, g) - mu_x * mu_x
    var_y = _filter_valid(y * y, g) - mu_y * mu_y
    cov = _filter_valid(x * y, g) - mu_x * mu_y
    num = (2 * mu_x * mu_y + c1) * (2 * cov + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    return float(np.mean(num / den))


def ssim(a: ColorImage, b: ColorImage) -> float:
    """Mean SSIM: 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03,
    dynamic range 1.0, valid-region windowing, averaged over channels."""
    if a.planes.shape != b.planes.shape:
        raise ValueError(f"shape mismatch: {a.planes.shape} vs {b.planes.shape}")
    if a.height < SSIM_WINDOW or a.width < SSIM_WINDOW:
        raise ValueError(
            f"image {a.height}x{a.width} smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window"
        )
    return float(np.mean([ssim_plane(a.planes[c], b.planes[c]) for c in range(3)]))


@dataclass
class MetricsReport:
    names: list[str] = field(default_factory=list)
    psnr_db: list[float] = field(default_factory=list)
    ssim: list[float] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, name: str, psnr_value: float, ssim_value: float) -> None:
        self.names.append(name)
        self.psnr_db.append(psnr_value)
        self.ssim.append(ssim_value)

    @property
    def mean_psnr_db(self) -> float:
        return float(np.mean(self.psnr_db)) if self.psnr_db else float("nan")

    @property
    def mean_ssim(self) -> float:
        return float(np.mean(self.ssim)) if self.ssim else float("nan")

    def to_csv(self, fileobj) -> None:
        writer = csv.writer(fileobj)
        meta_cols = sorted(self.metadata)
        writer.writerow(["name", "psnr_db", "ssim"] + meta_cols)
        meta_vals = [self.metadata[k] for k in meta_cols]
        for name, p, s in zip(self.names, self.psnr_db, self.ssim):
            writer.writerow([name, f"{p:.4f}", f"{s:.6f}"] + meta_vals)
        writer.writerow(["mean", f"{self.mean_psnr_db:.4f}", f"{self.mean_ssim:.6f}"] + meta_vals)
