"""Prediction cleanup for loosely-coupled scanner data: per-slice breast
component selection followed by 3D largest-component retention.

Connectivity is fixed at 4 in 2D and 6 in 3D. Both steps are shrinking,
binary-preserving and idempotent.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .types import Mask


def _component_stats(labels: np.ndarray, count: int):
    """(areas, centroid_x, first_flat_index) per label, 1-based."""
    flat = labels.ravel()
    areas = np.bincount(flat, minlength=count + 1)[1:]
    xs = np.broadcast_to(np.arange(labels.shape[1], dtype=np.float64),
                         labels.shape).ravel()
    sum_x = np.bincount(flat, weights=xs, minlength=count + 1)[1:]
    centroid_x = sum_x / areas
    return areas, centroid_x


def select_breast_component_2d(mask: Mask, min_area_px: int = 100,
                               left_low_x: bool = True) -> Mask:
    """Per axial slice, keep the most left-sided component above the area cut.

    Among 4-connected components with area strictly greater than
    ``min_area_px``, the one whose centroid lies furthest in the declared
    left direction wins (ties: larger area, then earlier raster-scan label).
    When no component exceeds the cut, the largest available component is
    kept instead. Empty slices stay empty.
    """
    if min_area_px < 0:
        raise ValueError("min_area_px must be >= 0")
    data = mask.data.copy()
    for z in range(data.shape[0]):
        labels, count = kernels.label_2d(data[z])
        if count <= 1:
            continue
        areas, centroid_x = _component_stats(labels, count)
        eligible = np.flatnonzero(areas > min_area_px)
        if eligible.size > 0:
            side = centroid_x[eligible] if left_low_x else -centroid_x[eligible]
            order = sorted(range(eligible.size),
                           key=lambda i: (side[i], -areas[eligible[i]], eligible[i]))
            keep = int(eligible[order[0]]) + 1
        else:
            keep = int(np.argmax(areas)) + 1  # largest; ties -> earliest label
        data[z] = (labels == keep).astype(np.uint8)
    return mask.with_data(data)


def largest_component_3d(mask: Mask) -> Mask:
    """Keep only the largest 6-connected 3D component (ties -> earliest label)."""
    labels, count = kernels.label_3d(mask.data)
    if count <= 1:
        return mask.with_data(mask.data.copy())
    areas = np.bincount(labels.ravel())[1:]
    keep = int(np.argmax(areas)) + 1
    return mask.with_data((labels == keep).astype(np.uint8))


def postprocess_qin(mask: Mask, min_area_px: int = 100,
                    left_low_x: bool = True) -> Mask:
    """Per-slice component selection, then 3D largest-component retention."""
    return largest_component_3d(
        select_breast_component_2d(mask, min_area_px=min_area_px,
                                   left_low_x=left_low_x))
