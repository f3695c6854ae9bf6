"""Core value types: volumes, masks, interpolation modes and affine transforms.

Conventions used throughout the package:

* ``Volume.data`` / ``Mask.data`` are 3D numpy arrays indexed ``[z, y, x]``
  (z slowest, matching the on-disk row-major layout).
* ``dims`` is reported as ``(nx, ny, nz)`` and ``spacing`` as
  ``(sx, sy, sz)`` in mm.
* With the default ``"axial"`` axis order, x runs left-right, y
  anterior-posterior and z inferior-superior; axial slices are xy planes.
  ``"sagittal"`` means in-plane x=anterior-posterior, y=inferior-superior,
  stacked along left-right; ``"coronal"`` means in-plane x=left-right,
  y=inferior-superior, stacked along anterior-posterior.

All operations on these types are pure: they never mutate their inputs and
identical inputs produce bit-identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

AXIS_ORDERS = ("axial", "sagittal", "coronal")

_DET_EPS = 1e-9


class Interp(Enum):
    """Interpolation scheme. NEAREST is mandatory for masks (keeps them binary)."""

    TRILINEAR = "trilinear"
    NEAREST = "nearest"


def _validate_spacing(spacing) -> tuple[float, float, float]:
    spacing = tuple(float(s) for s in spacing)
    if len(spacing) != 3:
        raise ValueError(f"spacing must have 3 components, got {spacing!r}")
    if not all(np.isfinite(s) and s > 0 for s in spacing):
        raise ValueError(f"spacing components must be finite and > 0, got {spacing!r}")
    return spacing


@dataclass
class Volume:
    """3D scalar grid plus per-axis physical spacing in mm."""

    data: np.ndarray
    spacing: tuple[float, float, float]
    axis_order: str = "axial"

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 3:
            raise ValueError(f"volume data must be 3D, got shape {data.shape}")
        if data.size == 0:
            raise ValueError("volume data must be non-empty")
        if not np.isfinite(data).all():
            raise ValueError("volume data contains non-finite values")
        self.data = data
        self.spacing = _validate_spacing(self.spacing)
        if self.axis_order not in AXIS_ORDERS:
            raise ValueError(f"unknown axis order {self.axis_order!r}")

    @property
    def dims(self) -> tuple[int, int, int]:
        """(nx, ny, nz)"""
        nz, ny, nx = self.data.shape
        return (nx, ny, nz)

    def with_data(self, data: np.ndarray) -> "Volume":
        return Volume(data, self.spacing, self.axis_order)


@dataclass
class Mask:
    """Binary 3D grid aligned to a Volume. Values are strictly {0, 1}."""

    data: np.ndarray
    spacing: tuple[float, float, float]
    axis_order: str = "axial"

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 3:
            raise ValueError(f"mask data must be 3D, got shape {data.shape}")
        if data.size == 0:
            raise ValueError("mask data must be non-empty")
        if data.dtype != np.uint8:
            if not np.isin(data, (0, 1)).all():
                raise ValueError("mask data must contain only 0 and 1")
            data = data.astype(np.uint8)
        elif data.max(initial=0) > 1:
            raise ValueError("mask data must contain only 0 and 1")
        self.data = data
        self.spacing = _validate_spacing(self.spacing)
        if self.axis_order not in AXIS_ORDERS:
            raise ValueError(f"unknown axis order {self.axis_order!r}")

    @property
    def dims(self) -> tuple[int, int, int]:
        """(nx, ny, nz)"""
        nz, ny, nx = self.data.shape
        return (nx, ny, nz)

    def with_data(self, data: np.ndarray) -> "Mask":
        return Mask(data, self.spacing, self.axis_order)


@dataclass
class Affine3:
    """3x3 linear part plus translation in mm, applied about the volume center.

    Forward convention: a point at physical position p maps to
    ``linear @ (p - c) + c + translation`` where c is the volume center.
    """

    linear: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        linear = np.asarray(self.linear, dtype=np.float64)
        translation = np.asarray(self.translation, dtype=np.float64)
        if linear.shape != (3, 3):
            raise ValueError(f"linear part must be 3x3, got {linear.shape}")
        if translation.shape != (3,):
            raise ValueError(f"translation must be a 3-vector, got {translation.shape}")
        if not (np.isfinite(linear).all() and np.isfinite(translation).all()):
            raise ValueError("affine parameters must be finite")
        if abs(np.linalg.det(linear)) <= _DET_EPS:
            raise ValueError("linear part is singular")
        self.linear = linear
        self.translation = translation

    @classmethod
    def identity(cls) -> "Affine3":
        return cls()

    def inverse(self) -> "Affine3":
        """Exact inverse under the same about-center convention."""
        inv = np.linalg.inv(self.linear)
        return Affine3(inv, -inv @ self.translation)
