"""Classical (non-learned) stage operators: demosaic, denoise, super-resolve.

All operators use reflect padding at borders (np.pad "reflect": the edge
sample is not repeated), compute in float64 internally and return the input
dtype. Every operator is identity on constant inputs.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .bayer import BayerMosaic, ColorImage, PackedMosaic

# Gradient-corrected 5x5 demosaic filters (Malvar, He, Cutler 2004), /8 so
# each has unit DC gain. _K_H has its strong taps along the center row,
# _K_V along the center column, _K_D on the diagonals.
_K_G = np.array(
    [
        [0, 0, -1, 0, 0],
        [0, 0, 2, 0, 0],
        [-1, 2, 4, 2, -1],
        [0, 0, 2, 0, 0],
        [0, 0, -1, 0, 0],
    ],
    dtype=np.float64,
) / 8.0
_K_H = np.array(
    [
        [0, 0, 0.5, 0, 0],
        [0, -1, 0, -1, 0],
        [-1, 4, 5, 4, -1],
        [0, -1, 0, -1, 0],
        [0, 0, 0.5, 0, 0],
    ],
    dtype=np.float64,
) / 8.0
_K_V = _K_H.T.copy()
_K_D = np.array(
    [
        [0, 0, -1.5, 0, 0],
        [0, 2, 0, 2, 0],
        [-1.5, 0, 6, 0, -1.5],
        [0, 2, 0, 2, 0],
        [0, 0, -1.5, 0, 0],
    ],
    dtype=np.float64,
) / 8.0


def _require_rggb(m: BayerMosaic) -> None:
    if m.pattern != "RGGB":
        raise ValueError(f"demosaic supports RGGB only, got {m.pattern}")


def _reflect_indices(n: int, lo: int, hi: int) -> np.ndarray:
    """Whole-sample reflection indices (np.pad "reflect"), valid for any pad."""
    idx = np.arange(-lo, n + hi)
    if n == 1:
        return np.zeros_like(idx)
    period = 2 * n - 2
    m = np.mod(idx, period)
    return np.where(m < n, m, period - m)


def reflect_pad(a: np.ndarray, pads) -> np.ndarray:
    """Like np.pad(mode="reflect") but without the pad-size limit."""
    out = a
    for axis, (lo, hi) in enumerate(pads):
        if lo == 0 and hi == 0:
            continue
        idx = _reflect_indices(a.shape[axis], lo, hi)
        out = np.take(out, idx, axis=axis)
    return out


def demosaic_bilinear(m: BayerMosaic) -> ColorImage:
    """Bilinear demosaic: each missing value is the average of its available
    same-channel neighbors (2 or 4 taps); present samples pass through."""
    _require_rggb(m)
    h, w = m.plane.shape
    p = reflect_pad(m.plane.astype(np.float64), ((1, 1), (1, 1)))

    def at(dy, dx):
        return p[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w]

    c = at(0, 0)
    north, south, west, east = at(-1, 0), at(1, 0), at(0, -1), at(0, 1)
    # pairwise sums keep averages of equal values exact
    orth = ((north + south) + (west + east)) * 0.25
    diag = ((at(-1, -1) + at(-1, 1)) + (at(1, -1) + at(1, 1))) * 0.25
    horiz = (west + east) * 0.5
    vert = (north + south) * 0.5

    r = np.empty((h, w), dtype=np.float64)
    g = np.empty((h, w), dtype=np.float64)
    b = np.empty((h, w), dtype=np.float64)

    r[0::2, 0::2] = c[0::2, 0::2]
    r[0::2, 1::2] = horiz[0::2, 1::2]
    r[1::2, 0::2] = vert[1::2, 0::2]
    r[1::2, 1::2] = diag[1::2, 1::2]

    g[0::2, 1::2] = c[0::2, 1::2]
    g[1::2, 0::2] = c[1::2, 0::2]
    g[0::2, 0::2] = orth[0::2, 0::2]
    g[1::2, 1::2] = orth[1::2, 1::2]

    b[1::2, 1::2] = c[1::2, 1::2]
    b[1::2, 0::2] = horiz[1::2, 0::2]
    b[0::2, 1::2] = vert[0::2, 1::2]
    b[0::2, 0::2] = diag[0::2, 0::2]

    out = np.stack([r, g, b]).astype(m.plane.dtype)
    return ColorImage(planes=out)


def demosaic_malvar(m: BayerMosaic) -> ColorImage:
    """Gradient-corrected linear demosaic using the 5x5 Malvar-He-Cutler
    filters. Output is clamped to [0, 1] (the filters can overshoot)."""
    _require_rggb(m)
    h, w = m.plane.shape
    p = reflect_pad(m.plane.astype(np.float64), ((2, 2), (2, 2)))
    win = sliding_window_view(p, (5, 5))  # (h, w, 5, 5)
    resp = np.tensordot(win, np.stack([_K_G, _K_H, _K_V, _K_D]), axes=([2, 3], [1, 2]))
    resp_g, resp_h, resp_v, resp_d = np.moveaxis(resp, 2, 0)
    c = m.plane.astype(np.float64)

    r = np.empty((h, w), dtype=np.float64)
    g = np.empty((h, w), dtype=np.float64)
    b = np.empty((h, w), dtype=np.float64)

    # R sites (even, even), G1 (even, odd), G2 (odd, even), B (odd, odd)
    r[0::2, 0::2] = c[0::2, 0::2]
    r[0::2, 1::2] = resp_h[0::2, 1::2]  # R row, left/right R neighbors
    r[1::2, 0::2] = resp_v[1::2, 0::2]
    r[1::2, 1::2] = resp_d[1::2, 1::2]

    g[0::2, 1::2] = c[0::2, 1::2]
    g[1::2, 0::2] = c[1::2, 0::2]
    g[0::2, 0::2] = resp_g[0::2, 0::2]
    g[1::2, 1::2] = resp_g[1::2, 1::2]

    b[1::2, 1::2] = c[1::2, 1::2]
    b[1::2, 0::2] = resp_h[1::2, 0::2]
    b[0::2, 1::2] = resp_v[0::2, 1::2]
    b[0::2, 0::2] = resp_d[0::2, 0::2]

    out = np.clip(np.stack([r, g, b]), 0.0, 1.0).astype(m.plane.dtype)
    return ColorImage(planes=out)


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian taps with radius ceil(3*sigma)."""
    if sigma <= 0:
        return np.ones(1, dtype=np.float64)
    radius = math.ceil(3.0 * sigma)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def _filter_axis(a: np.ndarray, k: np.ndarray, axis: int) -> np.ndarray:
    """Correlate along one axis with reflect padding (same-size output)."""
    radius = len(k) // 2
    if radius == 0:
        return a * k[0]
    pad = [(0, 0)] * a.ndim
    pad[axis] = (radius, radius)
    win = sliding_window_view(reflect_pad(a, pad), len(k), axis=axis)
    return np.tensordot(win, k, axes=([-1], [0]))


def blur_plane(plane: np.ndarray, sigma_f: float) -> np.ndarray:
    out = plane.astype(np.float64)
    k = gaussian_kernel(sigma_f)
    out = _filter_axis(out, k, axis=0)
    out = _filter_axis(out, k, axis=1)
    return out.astype(plane.dtype)


def denoise_gaussian(x, sigma_f: float):
    """Per-plane Gaussian blur. sigma_f = 0 is the identity. For a
    PackedMosaic the four planes are filtered independently, so the blur
    never mixes colors."""
    if sigma_f < 0:
        raise ValueError(f"sigma_f must be >= 0, got {sigma_f}")
    if isinstance(x, ColorImage):
        if sigma_f == 0:
            return ColorImage(planes=x.planes.copy())
        return ColorImage(planes=np.stack([blur_plane(p, sigma_f) for p in x.planes]))
    if isinstance(x, PackedMosaic):
        if sigma_f == 0:
            return PackedMosaic(planes=x.planes.copy())
        return PackedMosaic(planes=np.stack([blur_plane(p, sigma_f) for p in x.planes]))
    raise TypeError(f"expected ColorImage or PackedMosaic, got {type(x).__name__}")


# window used to estimate the local variance of the detail band
WIENER_VAR_SIGMA = 2.0


def wiener_shrink_plane(plane: np.ndarray, sigma_n: float, sigma_f: float) -> np.ndarray:
    """Locally adaptive Wiener-style shrinkage of the Gaussian detail band.

    Splits the plane into low = gauss(x, sigma_f) and detail d = x - low,
    estimates the local detail variance v, and keeps d scaled by
    max(0, v - var_n)/v, where var_n is the variance white noise of std
    sigma_n would leave in d. Flat areas collapse to the low-pass; structure
    passes through. With sigma_n = 0 (hence sigma_f = 0) it is the identity.
    """
    x = plane.astype(np.float64)
    low = blur_plane(x, sigma_f)
    d = x - low
    g = gaussian_kernel(sigma_f)
    center_sq = float(g[len(g) // 2]) ** 2
    sum_sq = float(np.dot(g, g)) ** 2
    var_n = sigma_n * sigma_n * (1.0 - 2.0 * center_sq + sum_sq)
    v = blur_plane(d * d, WIENER_VAR_SIGMA)
    gain = np.maximum(v - var_n, 0.0) / np.where(v > 0, v, 1.0)
    return (low + gain * d).astype(plane.dtype)


def denoise_wiener(x, sigma_n: float, sigma_f: float):
    """Per-plane adaptive shrinkage denoiser conditioned on the declared
    noise std sigma_n (on [0, 1] scale). Near-optimal on white noise of that
    level; when the actual noise is weaker or spatially correlated (e.g.
    after interpolation stages) the shrinkage collapses to the low-pass and
    removes little. sigma_f = 0 is the identity."""
    if sigma_n < 0 or sigma_f < 0:
        raise ValueError("sigma_n and sigma_f must be >= 0")
    if isinstance(x, (ColorImage, PackedMosaic)):
        if sigma_f == 0:
            return type(x)(planes=x.planes.copy())
        return type(x)(
            planes=np.stack([wiener_shrink_plane(p, sigma_n, sigma_f) for p in x.planes])
        )
    raise TypeError(f"expected ColorImage or PackedMosaic, got {type(x).__name__}")


def _catmull_rom(x: float) -> float:
    # Keys cubic kernel, a = -0.5
    ax = abs(x)
    if ax <= 1.0:
        return (1.5 * ax - 2.5) * ax * ax + 1.0
    if ax < 2.0:
        return -0.5 * (((ax - 5.0) * ax + 8.0) * ax - 4.0)
    return 0.0


def bicubic_upsample_plane(plane: np.ndarray, factor: int, shifts=(0.0, 0.0)) -> np.ndarray:
    """Separable Catmull-Rom upsampling with center-aligned sampling:
    output o maps to input coordinate (o + 0.5)/factor - 0.5 (+ per-axis
    shift, used for the phase-correct packed-mosaic path)."""
    if factor < 1:
        raise ValueError(f"factor must be >= 1, got {factor}")
    if factor == 1:
        return plane.copy()
    out = plane.astype(np.float64)
    for axis in (0, 1):
        out = _bicubic_axis(np.moveaxis(out, axis, -1), factor, shifts[axis])
        out = np.moveaxis(out, -1, axis)
    return out.astype(plane.dtype)


def _bicubic_axis(a: np.ndarray, factor: int, shift: float = 0.0) -> np.ndarray:
    n = a.shape[-1]
    pad = [(0, 0)] * (a.ndim - 1) + [(2, 2)]
    p = reflect_pad(a, pad)
    out = np.empty(a.shape[:-1] + (factor * n,), dtype=np.float64)
    for r in range(factor):
        x = (r + 0.5) / factor - 0.5 + shift
        i0 = math.floor(x)
        t = x - i0
        weights = [_catmull_rom(1 + t), _catmull_rom(t), _catmull_rom(1 - t), _catmull_rom(2 - t)]
        acc = np.zeros(a.shape, dtype=np.float64)
        for k, wk in enumerate(weights):
            start = i0 + 1 + k  # tap index in padded coordinates
            acc += wk * p[..., start : start + n]
        out[..., r::factor] = acc
    return out


def _packed_phase_shift(parity: int, factor: int) -> float:
    # A packed plane's sites sit at mosaic offset `parity` inside the 2x2
    # cell. Resampling it as the packing of a factor-times-larger mosaic
    # needs this extra offset so the four planes stay co-registered.
    return (parity - 0.5) * (1 - factor) / (2.0 * factor)


# (row parity, column parity) of the R, G1, G2, B sites in an RGGB cell
_PACKED_PARITIES = ((0, 0), (0, 1), (1, 0), (1, 1))


def sr_bicubic(x, factor: int):
    """Bicubic upsampling per plane.

    For a PackedMosaic each plane is resampled at its own CFA phase so the
    result is exactly the packing of a factor-times-larger mosaic, with the
    four planes co-registered on the scene.
    """
    if isinstance(x, ColorImage):
        if factor == 1:
            return ColorImage(planes=x.planes.copy())
        return ColorImage(
            planes=np.stack([bicubic_upsample_plane(p, factor) for p in x.planes])
        )
    if isinstance(x, PackedMosaic):
        if factor == 1:
            return PackedMosaic(planes=x.planes.copy())
        planes = [
            bicubic_upsample_plane(
                p,
                factor,
                shifts=(
                    _packed_phase_shift(py, factor),
                    _packed_phase_shift(px, factor),
                ),
            )
            for p, (py, px) in zip(x.planes, _PACKED_PARITIES)
        ]
        return PackedMosaic(planes=np.stack(planes))
    raise TypeError(f"expected ColorImage or PackedMosaic, got {type(x).__name__}")
