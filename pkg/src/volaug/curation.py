"""Ground-truth mask cleanup: 2D disconnected-region removal, inferior fat
cut and lateral boundary trimming.

All three operations are shrinking (output is a voxelwise subset of the
input) and keep masks binary. Anatomical directions follow the axial axis
order; where a dataset's convention differs, the direction flags flip the
relevant axis.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .types import Mask


def remove_disconnected_2d(mask: Mask) -> Mask:
    """Keep only the largest 4-connected component in every axial slice.

    Ties go to the component encountered first in raster-scan order; empty
    slices stay empty.
    """
    data = mask.data.copy()
    for z in range(data.shape[0]):
        labels, count = kernels.label_2d(data[z])
        if count <= 1:
            continue
        areas = np.bincount(labels.ravel())[1:]
        keep = int(np.argmax(areas)) + 1
        data[z] = (labels == keep).astype(np.uint8)
    return mask.with_data(data)


def _slice_envelope_cut(plane: np.ndarray, inferior_low: bool,
                        posterior_high: bool) -> np.ndarray:
    """Cut the inferior fat flap in one sagittal plane (rows=z, cols=y).

    The inferior envelope is the most-inferior occupied row per column; the
    cut point is the interior envelope point with the largest window-3
    second difference toward superior (the crease between breast and fat).
    Everything strictly inferior to that row, from that column toward the
    posterior edge, is removed. Planes without a positive-concavity point
    are returned unchanged.
    """
    nz, ny = plane.shape
    occupied = plane.any(axis=0)
    cols = np.flatnonzero(occupied)
    if cols.size < 3:
        return plane
    # depth increases toward inferior regardless of the z convention
    if inferior_low:
        env = np.argmax(plane[:, cols] != 0, axis=0)  # min occupied z
        depth = -env.astype(np.float64)
    else:
        env = nz - 1 - np.argmax(plane[::-1, cols] != 0, axis=0)  # max occupied z
        depth = env.astype(np.float64)

    best_kappa = 0.0
    best_i = -1
    for i in range(1, cols.size - 1):
        if cols[i - 1] + 1 != cols[i] or cols[i] + 1 != cols[i + 1]:
            continue  # envelope gap: second difference undefined
        kappa = depth[i - 1] + depth[i + 1] - 2.0 * depth[i]
        if kappa <= 0.0:
            continue
        if best_i < 0 or kappa > best_kappa:
            take = True
        elif kappa == best_kappa:
            # ties resolve toward the posterior edge
            take = (cols[i] > cols[best_i]) if posterior_high else (cols[i] < cols[best_i])
        else:
            take = False
        if take:
            best_kappa = kappa
            best_i = i
    if best_i < 0:
        return plane

    cut_col = int(cols[best_i])
    cut_row = int(env[best_i])
    out = plane.copy()
    col_span = slice(cut_col, ny) if posterior_high else slice(0, cut_col + 1)
    row_span = slice(0, cut_row) if inferior_low else slice(cut_row + 1, nz)
    out[row_span, col_span] = 0
    return out


def cut_inferior_fat(mask: Mask, inferior_low_z: bool = True,
                     posterior_high_y: bool = True) -> Mask:
    """Remove the fat flap below the most concave point under the breast.

    Operates per sagittal plane (fixed x), where both the inferior (z) and
    posterior (y) directions lie in-plane. Direction defaults: inferior =
    low z, posterior = high y.
    """
    data = mask.data.copy()
    nx = data.shape[2]
    for x in range(nx):
        plane = data[:, :, x]
        if not plane.any():
            continue
        data[:, :, x] = _slice_envelope_cut(plane, inferior_low_z, posterior_high_y)
    return mask.with_data(data)


def trim_lateral_boundary(mask: Mask, chest_low_x: bool = True) -> Mask:
    """Zero all sagittal slices on the chest side of the breast boundary.

    The boundary is the slice with the largest forward increase of the
    per-slice mask area along the left-right axis (ties -> smallest index).
    Masks whose area profile never increases are returned unchanged.
    """
    data = mask.data
    if not chest_low_x:
        flipped = trim_lateral_boundary(
            mask.with_data(np.ascontiguousarray(data[:, :, ::-1])), chest_low_x=True)
        return mask.with_data(np.ascontiguousarray(flipped.data[:, :, ::-1]))
    areas = data.sum(axis=(0, 1)).astype(np.int64)
    if areas.size < 2:
        return mask.with_data(data.copy())
    diffs = areas[1:] - areas[:-1]
    if diffs.max() <= 0:
        return mask.with_data(data.copy())
    boundary = int(np.argmax(diffs))
    out = data.copy()
    out[:, :, :boundary + 1] = 0
    return mask.with_data(out)
