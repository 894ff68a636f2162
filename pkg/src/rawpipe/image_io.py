"""Image file I/O: 8/16-bit PNG (via OpenCV) and binary PGM/PPM.

All pixel data crosses this boundary as linear floats in [0, 1]; integer
files are scaled by 1/255 or 1/65535. Values are clamped to [0, 1] on write.
Mosaics are stored single-channel 16-bit; PNM files use maxval 65535 with
big-endian samples per the Netpbm convention.
"""

from __future__ import annotations

import re
from pathlib import Path

import cv2
import numpy as np

from .bayer import BayerMosaic, ColorImage

IMAGE_EXTENSIONS = (".png", ".ppm", ".pgm", ".pnm")


def _to_uint16(x: np.ndarray) -> np.ndarray:
    return np.round(np.clip(x, 0.0, 1.0) * 65535.0).astype(np.uint16)


def _to_uint8(x: np.ndarray) -> np.ndarray:
    return np.round(np.clip(x, 0.0, 1.0) * 255.0).astype(np.uint8)


def _from_int(arr: np.ndarray) -> np.ndarray:
    peak = 65535.0 if arr.dtype == np.uint16 else 255.0
    return (arr.astype(np.float32) / np.float32(peak)).astype(np.float32)


def write_gray(path, plane: np.ndarray, bits: int = 16) -> None:
    path = Path(path)
    data = _to_uint16(plane) if bits == 16 else _to_uint8(plane)
    if path.suffix.lower() == ".png":
        if not cv2.imwrite(str(path), data):
            raise IOError(f"failed to write {path}")
    else:
        _write_pnm(path, data)


def write_color(path, img: ColorImage, bits: int = 16) -> None:
    path = Path(path)
    hwc = np.moveaxis(img.planes, 0, 2)
    data = _to_uint16(hwc) if bits == 16 else _to_uint8(hwc)
    if path.suffix.lower() == ".png":
        if not cv2.imwrite(str(path), data[:, :, ::-1]):  # RGB -> BGR
            raise IOError(f"failed to write {path}")
    else:
        _write_pnm(path, data)


def read_plane(path) -> np.ndarray:
    """Read a single-channel image as float32 in [0, 1]."""
    arr = _read_any(path)
    if arr.ndim != 2:
        raise ValueError(f"{path}: expected single-channel image, got shape {arr.shape}")
    return _from_int(arr)


def read_color(path) -> ColorImage:
    """Read an image as a ColorImage; grayscale inputs are replicated to RGB."""
    arr = _read_any(path)
    if arr.ndim == 2:
        arr = np.stack([arr] * 3, axis=2)
    if arr.shape[2] != 3:
        raise ValueError(f"{path}: expected 3 channels, got {arr.shape[2]}")
    return ColorImage(planes=np.moveaxis(_from_int(arr), 2, 0))


def read_mosaic(path, pattern: str = "RGGB") -> BayerMosaic:
    return BayerMosaic(plane=read_plane(path), pattern=pattern)


def _read_any(path) -> np.ndarray:
    path = Path(path)
    if not path.is_file():
        raise IOError(f"no such file: {path}")
    if path.suffix.lower() in (".ppm", ".pgm", ".pnm"):
        return _read_pnm(path)
    arr = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if arr is None:
        raise IOError(f"unreadable image: {path}")
    if arr.ndim == 3:
        if arr.shape[2] == 4:
            arr = arr[:, :, :3]
        arr = arr[:, :, ::-1]  # BGR -> RGB
    if arr.dtype not in (np.uint8, np.uint16):
        raise ValueError(f"{path}: unsupported sample type {arr.dtype}")
    return arr


def _write_pnm(path: Path, data: np.ndarray) -> None:
    if data.ndim == 2:
        magic = b"P5"
    elif data.ndim == 3 and data.shape[2] == 3:
        magic = b"P6"
    else:
        raise ValueError(f"cannot write PNM with shape {data.shape}")
    h, w = data.shape[:2]
    maxval = 65535 if data.dtype == np.uint16 else 255
    payload = data.astype(">u2").tobytes() if maxval == 65535 else data.tobytes()
    with open(path, "wb") as f:
        f.write(magic + b"\n%d %d\n%d\n" % (w, h, maxval))
        f.write(payload)


def _read_pnm(path: Path) -> np.ndarray:
    raw = path.read_bytes()
    m = re.match(rb"(P[56])\s+(?:#[^\n]*\s+)*(\d+)\s+(\d+)\s+(\d+)\s", raw)
    if m is None:
        raise ValueError(f"{path}: not a binary PGM/PPM")
    magic, w, h, maxval = m.group(1), int(m.group(2)), int(m.group(3)), int(m.group(4))
    channels = 1 if magic == b"P5" else 3
    offset = m.end()
    count = w * h * channels
    if maxval > 255:
        arr = np.frombuffer(raw, dtype=">u2", count=count, offset=offset).astype(np.uint16)
    else:
        arr = np.frombuffer(raw, dtype=np.uint8, count=count, offset=offset)
    shape = (h, w) if channels == 1 else (h, w, 3)
    return arr.reshape(shape)
