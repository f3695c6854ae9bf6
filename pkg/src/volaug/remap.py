"""Randomized intensity remapping.

A lookup table over the 0-255 intensity domain is built from smoothed
uniform noise plus a signed linear ramp, then applied voxelwise after
per-volume min-max normalization. The linear component preserves a degree
of the original intensity ordering; its weight controls how much.

Curve construction, in order:
  1. draw 256 samples from Uniform[0, 255]
  2. centered moving average of the configured window, edges replicated
  3. min-max rescale to [0, 255]
  4. draw the ramp sign (equiprobable, or +1 when sign_random is off)
  5. add linear_weight * sign * i
  6. min-max rescale to [0, 255]
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import normalize_u8
from .types import Volume


@dataclass
class RemapConfig:
    window: int = 20
    linear_weight: float = 0.5
    sign_random: bool = True

    def __post_init__(self):
        self.window = int(self.window)
        self.linear_weight = float(self.linear_weight)
        self.sign_random = bool(self.sign_random)
        if not (1 <= self.window <= 256):
            raise ValueError(f"window must be in [1, 256], got {self.window}")
        if self.linear_weight < 0:
            raise ValueError("linear_weight must be >= 0")


@dataclass
class RemapCurve:
    """A 256-entry intensity lookup table plus the draw that produced it."""

    lut: np.ndarray
    config: RemapConfig
    sign: int
    seed: Optional[int] = None

    def __post_init__(self):
        lut = np.asarray(self.lut, dtype=np.float64)
        if lut.shape != (256,):
            raise ValueError(f"lut must have 256 entries, got shape {lut.shape}")
        if not np.isfinite(lut).all():
            raise ValueError("lut entries must be finite")
        if lut.min() < 0.0 or lut.max() > 255.0:
            raise ValueError("lut entries must lie in [0, 255]")
        self.lut = lut

    def as_list(self) -> list[float]:
        return [float(v) for v in self.lut]


def _rescale_0_255(values: np.ndarray) -> np.ndarray:
    lo = float(values.min())
    hi = float(values.max())
    if hi == lo:
        return np.zeros_like(values)
    # divide-then-scale keeps the endpoints exactly at 0 and 255
    return (values - lo) / (hi - lo) * 255.0


def _moving_average(values: np.ndarray, window: int) -> np.ndarray:
    if window == 1:
        return values.copy()
    lo = (window - 1) // 2
    hi = window // 2
    padded = np.concatenate([
        np.full(lo, values[0]), values, np.full(hi, values[-1]),
    ])
    return np.convolve(padded, np.full(window, 1.0 / window), mode="valid")


def generate_remap_curve(rng, cfg: RemapConfig | None = None,
                         seed: int | None = None) -> RemapCurve:
    """Draw a remapping curve from ``rng`` (needs .uniform and .random).

    Deterministic given the generator state; the optional ``seed`` is only
    recorded on the curve for provenance.
    """
    cfg = cfg or RemapConfig()
    noise = np.asarray(rng.uniform(0.0, 255.0, 256), dtype=np.float64)
    smoothed = _rescale_0_255(_moving_average(noise, cfg.window))
    if cfg.sign_random:
        sign = 1 if rng.random() < 0.5 else -1
    else:
        sign = 1
    ramped = smoothed + cfg.linear_weight * sign * np.arange(256, dtype=np.float64)
    return RemapCurve(lut=_rescale_0_255(ramped), config=cfg, sign=sign, seed=seed)


def apply_remap(vol: Volume, curve: RemapCurve) -> Volume:
    """Remap intensities through the curve's LUT.

    The volume is min-max normalized to 0-255 first (MR intensities are
    arbitrary), then each voxel indexes the LUT by its rounded intensity
    (round-half-to-even). Geometry is untouched.
    """
    norm = normalize_u8(vol)
    idx = np.rint(np.clip(norm.data, 0.0, 255.0)).astype(np.intp)
    return vol.with_data(curve.lut[idx])
