"""Slice extraction and lossless PNG rendering for the preview service.

Rendering is deterministic: the same volume, axis, index and windowing
always produce the same PNG bytes, which is what makes preview responses
comparable byte-for-byte with pipeline outputs.
"""

from __future__ import annotations

import io

import numpy as np
from PIL import Image

AXES = ("x", "y", "z")


def slice_count(vol, axis: str) -> int:
    nx, ny, nz = vol.dims
    return {"x": nx, "y": ny, "z": nz}[axis]


def extract_slice(vol, axis: str, index: int) -> np.ndarray:
    """2D slice of a volume. Image rows/cols: z-slice -> (y, x);
    y-slice -> (z, x); x-slice -> (z, y)."""
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    index = int(index)
    if not 0 <= index < slice_count(vol, axis):
        raise IndexError(f"slice index {index} out of range for axis {axis}")
    if axis == "z":
        return np.asarray(vol.data[index, :, :], dtype=np.float64)
    if axis == "y":
        return np.asarray(vol.data[:, index, :], dtype=np.float64)
    return np.asarray(vol.data[:, :, index], dtype=np.float64)


def window_u8(slice2d: np.ndarray) -> np.ndarray:
    """Min-max window a slice to uint8; constant slices map to zeros."""
    lo = float(slice2d.min())
    hi = float(slice2d.max())
    if hi == lo:
        return np.zeros(slice2d.shape, dtype=np.uint8)
    scaled = (slice2d - lo) / (hi - lo) * 255.0
    return np.rint(scaled).astype(np.uint8)


def slice_png(vol, axis: str, index: int) -> bytes:
    """Lossless 8-bit grayscale PNG of one windowed slice."""
    arr = window_u8(extract_slice(vol, axis, index))
    buf = io.BytesIO()
    Image.fromarray(arr, mode="L").save(buf, format="PNG")
    return buf.getvalue()
