"""Procedural test imagery: naturalistic scenes and a zone plate.

The generator composes a 1/f-spectrum luma field, weaker chroma fields,
soft-edged elliptical patches and an oriented sinusoidal texture, then
applies a mild Gaussian PSF so scenes are optically band-limited the way
camera output is (lens PSF plus anti-alias filtering). Fully deterministic
per (size, seed).
"""

from __future__ import annotations

import numpy as np

from .bayer import ColorImage
from .classical import blur_plane
from .degrade import derive_seed, rng_for

# optical softness of generated scenes, in GT pixels
SCENE_PSF_SIGMA = 1.5


def _spectral_noise(rng: np.random.Generator, h: int, w: int, alpha: float) -> np.ndarray:
    """Zero-mean random field with a 1/f^alpha amplitude spectrum, unit std."""
    white = rng.standard_normal((h, w))
    spec = np.fft.rfft2(white)
    fy = np.fft.fftfreq(h)[:, None]
    fx = np.fft.rfftfreq(w)[None, :]
    radius = np.hypot(fy, fx)
    radius[0, 0] = 1.0  # keep DC finite; removed below anyway
    spec *= radius**-alpha
    spec[0, 0] = 0.0
    field = np.fft.irfft2(spec, s=(h, w))
    std = field.std()
    return field / std if std > 0 else field


def natural_image(
    height: int, width: int, seed: int = 0, psf_sigma: float = SCENE_PSF_SIGMA
) -> ColorImage:
    """A deterministic photographic-looking test image in [0, 1], float32."""
    rng = rng_for(seed)
    luma = _spectral_noise(rng, height, width, alpha=2.0)
    chroma_a = _spectral_noise(rng, height, width, alpha=2.2)
    chroma_b = _spectral_noise(rng, height, width, alpha=2.2)
    img = np.stack(
        [
            0.18 * luma + 0.05 * chroma_a,
            0.18 * luma,
            0.18 * luma + 0.05 * chroma_b,
        ]
    )
    img += 0.5

    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    for _ in range(10):
        cy, cx = rng.uniform(0, height), rng.uniform(0, width)
        ry = rng.uniform(height / 12, height / 3)
        rx = rng.uniform(width / 12, width / 3)
        m = ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2
        edge = np.clip((1.0 - m) * rng.uniform(5, 12), 0.0, 1.0)  # soft rim
        color = rng.uniform(0.15, 0.85, size=3)
        opacity = rng.uniform(0.4, 0.85)
        img = img * (1 - opacity * edge) + color[:, None, None] * (opacity * edge)

    # one oriented sinusoidal texture patch for controlled high frequency
    theta = rng.uniform(0, np.pi)
    freq = rng.uniform(0.06, 0.14)
    phase = rng.uniform(0, 2 * np.pi)
    wave = 0.05 * np.sin(2 * np.pi * freq * (np.cos(theta) * xx + np.sin(theta) * yy) + phase)
    cy, cx = rng.uniform(0, height), rng.uniform(0, width)
    sel = np.exp(-(((yy - cy) / (height / 5)) ** 2 + ((xx - cx) / (width / 5)) ** 2))
    img += (wave * sel)[None]

    if psf_sigma > 0:
        img = np.stack([blur_plane(p, psf_sigma) for p in img])

    lo, hi = np.percentile(img, [0.5, 99.5])
    img = 0.02 + 0.96 * (img - lo) / max(hi - lo, 1e-9)
    return ColorImage(planes=np.clip(img, 0.0, 1.0).astype(np.float32))


def natural_dataset(count: int, height: int, width: int, seed: int = 0) -> list[ColorImage]:
    return [natural_image(height, width, derive_seed(seed, 1000 + i)) for i in range(count)]


def zone_plate(height: int, width: int, max_freq: float = np.pi) -> ColorImage:
    """Gray zone plate: radial chirp sweeping 0..max_freq rad/px from the
    center, identical in all channels. The classic demosaic stress pattern."""
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    cy, cx = (height - 1) / 2.0, (width - 1) / 2.0
    r2 = (yy - cy) ** 2 + (xx - cx) ** 2
    rmax = np.hypot(cy, cx)
    k = max_freq / (2.0 * rmax)
    g = 0.5 + 0.5 * np.cos(k * r2)
    return ColorImage(planes=np.stack([g, g, g]).astype(np.float32))
