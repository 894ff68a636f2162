"""Bayer mosaic data model: CFA sampling and the 4-plane packed representation.

All pixel data is linear-light floating point in [0, 1]. Images are planar:
``ColorImage.planes`` is ``(3, H, W)`` in R, G, B order, ``BayerMosaic.plane``
is ``(H, W)``, and ``PackedMosaic.planes`` is ``(4, H/2, W/2)`` in
(R, G1, G2, B) order, where G1 is the green sharing a row with R.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# 2x2 channel layout per CFA tag: entry [y % 2][x % 2] is the RGB channel
# index sampled at that site.
CFA_LAYOUTS = {
    "RGGB": ((0, 1), (1, 2)),
    "GRBG": ((1, 0), (2, 1)),
    "GBRG": ((1, 2), (0, 1)),
    "BGGR": ((2, 1), (1, 0)),
}


def _require_even(height: int, width: int, what: str) -> None:
    if height % 2 or width % 2:
        raise ValueError(f"{what} dimensions must be even, got {height}x{width}")


@dataclass
class ColorImage:
    """Planar 3-channel image, shape (3, H, W), values in [0, 1]."""

    planes: np.ndarray

    def __post_init__(self):
        self.planes = np.asarray(self.planes)
        if self.planes.ndim != 3 or self.planes.shape[0] != 3:
            raise ValueError(f"expected (3, H, W) planes, got {self.planes.shape}")
        h, w = self.planes.shape[1:]
        _require_even(h, w, "ColorImage")
        if h < 4 or w < 4:
            raise ValueError(f"ColorImage must be at least 4x4, got {h}x{w}")
        if not np.isfinite(self.planes).all():
            raise ValueError("ColorImage contains non-finite values")

    @property
    def height(self) -> int:
        return self.planes.shape[1]

    @property
    def width(self) -> int:
        return self.planes.shape[2]


@dataclass
class BayerMosaic:
    """Single-plane CFA-sampled image with a pattern tag."""

    plane: np.ndarray
    pattern: str = "RGGB"

    def __post_init__(self):
        self.plane = np.asarray(self.plane)
        if self.plane.ndim != 2:
            raise ValueError(f"expected (H, W) plane, got {self.plane.shape}")
        _require_even(*self.plane.shape, what="BayerMosaic")
        if self.pattern not in CFA_LAYOUTS:
            raise ValueError(f"unknown CFA pattern {self.pattern!r}")
        if not np.isfinite(self.plane).all():
            raise ValueError("BayerMosaic contains non-finite values")

    @property
    def height(self) -> int:
        return self.plane.shape[0]

    @property
    def width(self) -> int:
        return self.plane.shape[1]


@dataclass
class PackedMosaic:
    """Four half-resolution color planes (R, G1, G2, B), shape (4, H/2, W/2)."""

    planes: np.ndarray
    pattern: str = "RGGB"

    def __post_init__(self):
        self.planes = np.asarray(self.planes)
        if self.planes.ndim != 3 or self.planes.shape[0] != 4:
            raise ValueError(f"expected (4, h, w) planes, got {self.planes.shape}")
        if self.pattern != "RGGB":
            raise ValueError("PackedMosaic only supports RGGB")
        if not np.isfinite(self.planes).all():
            raise ValueError("PackedMosaic contains non-finite values")

    @property
    def height(self) -> int:
        """Height of the equivalent unpacked mosaic."""
        return 2 * self.planes.shape[1]

    @property
    def width(self) -> int:
        return 2 * self.planes.shape[2]


def mosaic_from_color(img: ColorImage, pattern: str = "RGGB") -> BayerMosaic:
    """Sample a color image under a CFA. Pure subsampling, no interpolation.

    The value at (y, x) is the channel selected by the pattern's 2x2 parity
    at that site.
    """
    if pattern not in CFA_LAYOUTS:
        raise ValueError(f"unknown CFA pattern {pattern!r}")
    layout = CFA_LAYOUTS[pattern]
    plane = np.empty(img.planes.shape[1:], dtype=img.planes.dtype)
    for py in (0, 1):
        for px in (0, 1):
            ch = layout[py][px]
            plane[py::2, px::2] = img.planes[ch, py::2, px::2]
    return BayerMosaic(plane=plane, pattern=pattern)


def pack(m: BayerMosaic) -> PackedMosaic:
    """Split a mosaic into its four 2x2-phase planes (R, G1, G2, B). Bijective."""
    if m.pattern != "RGGB":
        raise ValueError("pack only supports RGGB")
    p = m.plane
    planes = np.stack([p[0::2, 0::2], p[0::2, 1::2], p[1::2, 0::2], p[1::2, 1::2]])
    return PackedMosaic(planes=planes)


def unpack(p: PackedMosaic) -> BayerMosaic:
    """Exact inverse of :func:`pack`."""
    r, g1, g2, b = p.planes
    plane = np.empty((p.height, p.width), dtype=p.planes.dtype)
    plane[0::2, 0::2] = r
    plane[0::2, 1::2] = g1
    plane[1::2, 0::2] = g2
    plane[1::2, 1::2] = b
    return BayerMosaic(plane=plane, pattern="RGGB")
