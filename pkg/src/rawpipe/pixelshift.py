"""Four-shot pixel-shift capture simulation and its full-color merge.

Each shot samples the scene under the CFA with the sensor offset by one
pixel (toroidal shift of the CFA phase), so across the four shots every
pixel is observed once in R, twice in G and once in B. Merging the shots
therefore reconstructs the full color image exactly on static scenes.
"""

from __future__ import annotations

import numpy as np

from .bayer import CFA_LAYOUTS, BayerMosaic, ColorImage

# sensor offsets (dy, dx) of the four exposures
SHIFT_OFFSETS = ((0, 0), (0, 1), (1, 1), (1, 0))


def shifted_pattern(pattern: str, dy: int, dx: int) -> str:
    """CFA tag seen by a sensor shifted by (dy, dx) pixels."""
    base = CFA_LAYOUTS[pattern]
    layout = tuple(
        tuple(base[(y + dy) % 2][(x + dx) % 2] for x in (0, 1)) for y in (0, 1)
    )
    for tag, lay in CFA_LAYOUTS.items():
        if lay == layout:
            return tag
    raise ValueError(f"no CFA tag for shifted layout of {pattern}")  # pragma: no cover


def capture_shifts(img: ColorImage, pattern: str = "RGGB") -> list[BayerMosaic]:
    """Simulate the four one-pixel-shifted exposures of a static scene."""
    from .bayer import mosaic_from_color

    return [
        mosaic_from_color(img, shifted_pattern(pattern, dy, dx))
        for dy, dx in SHIFT_OFFSETS
    ]


def merge_shifts(shots: list[BayerMosaic], pattern: str = "RGGB") -> ColorImage:
    """Reassemble per-pixel R, G, B from four shifted shots; the two green
    observations are averaged. Exact inverse of capture on static scenes."""
    if len(shots) != 4:
        raise ValueError(f"expected 4 shots, got {len(shots)}")
    shape = shots[0].plane.shape
    for s in shots[1:]:
        if s.plane.shape != shape:
            raise ValueError("shots have inconsistent shapes")
    acc = np.zeros((3,) + shape, dtype=np.float64)
    count = np.zeros((3,) + shape, dtype=np.int64)
    for shot in shots:
        layout = CFA_LAYOUTS[shot.pattern]
        for py in (0, 1):
            for px in (0, 1):
                ch = layout[py][px]
                acc[ch, py::2, px::2] += shot.plane[py::2, px::2]
                count[ch, py::2, px::2] += 1
    if not ((count[0] == 1).all() and (count[1] == 2).all() and (count[2] == 1).all()):
        raise ValueError("shot phase tags do not cover R once, G twice, B once per pixel")
    acc[1] *= 0.5
    return ColorImage(planes=acc.astype(shots[0].plane.dtype))
