"""Geometric augmentation: parameter sampling and application.

Default ranges: uniform scale 0.8-1.2, in-plane rotation -5..5 degrees about
the slice (z) axis, translation up to 10 mm in plane and 5 mm along the
slice axis. The transform composes scale, then rotation, then translation,
all about the volume center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import apply_affine
from .types import Affine3, Interp, Mask


@dataclass
class GeoConfig:
    scale_range: tuple[float, float] = (0.8, 1.2)
    rot_range_deg: tuple[float, float] = (-5.0, 5.0)
    trans_inplane_mm: float = 10.0
    trans_slice_mm: float = 5.0

    def __post_init__(self):
        self.scale_range = (float(self.scale_range[0]), float(self.scale_range[1]))
        self.rot_range_deg = (float(self.rot_range_deg[0]), float(self.rot_range_deg[1]))
        self.trans_inplane_mm = float(self.trans_inplane_mm)
        self.trans_slice_mm = float(self.trans_slice_mm)
        if self.scale_range[0] <= 0:
            raise ValueError("scale range lower bound must be > 0")
        if self.scale_range[0] > self.scale_range[1]:
            raise ValueError("scale range must satisfy lo <= hi")
        if self.rot_range_deg[0] > self.rot_range_deg[1]:
            raise ValueError("rotation range must satisfy lo <= hi")
        if self.trans_inplane_mm < 0 or self.trans_slice_mm < 0:
            raise ValueError("translation maxima must be >= 0")


@dataclass
class GeoParams:
    """One concrete draw; trans_mm is (tx, ty, tz) with tz the slice axis."""

    scale: float
    rot_deg: float
    trans_mm: tuple[float, float, float]

    def inverse(self) -> "GeoParams":
        """Parameters that exactly undo this transform (about the same center)."""
        inv_scale = 1.0 / self.scale
        rad = math.radians(-self.rot_deg)
        c, s = math.cos(rad), math.sin(rad)
        tx, ty, tz = self.trans_mm
        # -(1/s) * Rz(-theta) @ t
        return GeoParams(
            scale=inv_scale,
            rot_deg=-self.rot_deg,
            trans_mm=(
                -inv_scale * (c * tx - s * ty),
                -inv_scale * (s * tx + c * ty),
                -inv_scale * tz,
            ),
        )


def sample_geo_params(rng: np.random.Generator, cfg: GeoConfig) -> GeoParams:
    """Uniform draw of every parameter from its configured range.

    Fixed draw order (scale, rotation, tx, ty, tz) keeps streams reproducible.
    """
    scale = float(rng.uniform(cfg.scale_range[0], cfg.scale_range[1]))
    rot = float(rng.uniform(cfg.rot_range_deg[0], cfg.rot_range_deg[1]))
    tx = float(rng.uniform(-cfg.trans_inplane_mm, cfg.trans_inplane_mm))
    ty = float(rng.uniform(-cfg.trans_inplane_mm, cfg.trans_inplane_mm))
    tz = float(rng.uniform(-cfg.trans_slice_mm, cfg.trans_slice_mm))
    return GeoParams(scale=scale, rot_deg=rot, trans_mm=(tx, ty, tz))


def geo_affine(p: GeoParams) -> Affine3:
    """Affine for ``p``: uniform scale, then z-axis rotation, then translation."""
    rad = math.radians(p.rot_deg)
    c, s = math.cos(rad), math.sin(rad)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return Affine3(rot * p.scale, np.asarray(p.trans_mm, dtype=np.float64))


def geo_transform(vol, p: GeoParams):
    """Apply ``p`` to a Volume (trilinear) or Mask (nearest).

    The same params applied to an image and its mask keep them aligned.
    """
    interp = Interp.NEAREST if isinstance(vol, Mask) else Interp.TRILINEAR
    return apply_affine(vol, geo_affine(p), interp)
