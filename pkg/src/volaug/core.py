"""Volume-core operations: resampling, affine warping, crop/pad, breast-half
splitting, intensity normalization and the standard preprocessing chain.

All sampling is backward warping: every output voxel looks up its value at
the inverse-mapped input position. Voxel i along an axis with spacing s sits
at physical coordinate i*s; the volume center (rotation/scale origin) is at
(n-1)/2 * s per axis.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .types import Affine3, Interp, Mask, Volume

DEFAULT_TARGET_SPACING_MM = 2.0
DEFAULT_TARGET_DIMS = (64, 128, 128)  # (nx, ny, nz)

# Axis permutations onto the axial layout; entries are transpose orders for
# the (z, y, x) data array and index orders for the (sx, sy, sz) spacing.
_TO_AXIAL = {
    "axial": ((0, 1, 2), (0, 1, 2)),
    "sagittal": ((1, 2, 0), (2, 0, 1)),
    "coronal": ((1, 0, 2), (0, 2, 1)),
}


def _interp_for(vol, interp):
    if isinstance(vol, Mask):
        if interp is not Interp.NEAREST:
            raise ValueError("masks must be resampled with Interp.NEAREST")
        return False
    return interp is Interp.TRILINEAR


def _pad_value(vol) -> float:
    # Background air is the darkest tissue in these scans; masks pad with 0.
    if isinstance(vol, Mask):
        return 0.0
    return float(vol.data.min())


def _rebuild(vol, data):
    if isinstance(vol, Mask):
        return Mask(np.rint(data).astype(np.uint8), vol.spacing, vol.axis_order)
    return Volume(data, vol.spacing, vol.axis_order)


def reorient_to_axial(vol):
    """Permute axes so the volume carries the canonical axial axis order.

    Only axis permutation is performed; handedness flips are out of scope
    (dataset orientation is declared in the manifest).
    """
    if vol.axis_order == "axial":
        return vol
    transpose, sperm = _TO_AXIAL[vol.axis_order]
    data = np.ascontiguousarray(vol.data.transpose(transpose))
    spacing = tuple(vol.spacing[i] for i in sperm)
    cls = Mask if isinstance(vol, Mask) else Volume
    return cls(data, spacing, "axial")


def resample_isotropic(vol, target_spacing_mm: float, interp: Interp):
    """Resample to isotropic spacing; output dims are round(dim*spacing/t).

    Sample positions preserve physical coordinates (index 0 stays at physical
    0); positions falling outside the source grid replicate the edge.
    """
    t = float(target_spacing_mm)
    if not (np.isfinite(t) and t > 0):
        raise ValueError(f"target spacing must be positive, got {target_spacing_mm!r}")
    trilinear = _interp_for(vol, interp)
    nx, ny, nz = vol.dims
    sx, sy, sz = vol.spacing
    out_dims = tuple(
        max(1, int(np.rint(n * s / t))) for n, s in ((nx, sx), (ny, sy), (nz, sz))
    )
    matrix = np.diag([t / sx, t / sy, t / sz])
    data = kernels.affine_sample(
        vol.data, matrix, np.zeros(3), out_dims, trilinear, use_pad=False
    )
    cls = Mask if isinstance(vol, Mask) else Volume
    if isinstance(vol, Mask):
        data = np.rint(data).astype(np.uint8)
    return cls(data, (t, t, t), vol.axis_order)


def crop_or_pad(vol, target_dims: tuple[int, int, int]):
    """Center-aligned crop/pad to ``target_dims`` = (tx, ty, tz).

    On odd differences the extra cell goes to the high-index side. Padding
    uses the volume minimum (0 for masks); spacing is unchanged.
    """
    tx, ty, tz = (int(t) for t in target_dims)
    if min(tx, ty, tz) < 1:
        raise ValueError(f"target dims must be positive, got {target_dims!r}")
    nx, ny, nz = vol.dims
    pad = _pad_value(vol)
    dtype = np.uint8 if isinstance(vol, Mask) else np.float64
    out = np.full((tz, ty, tx), pad, dtype=dtype)

    def spans(n, t):
        if n >= t:
            lo = (n - t) // 2
            return slice(lo, lo + t), slice(0, t)
        lo = (t - n) // 2
        return slice(0, n), slice(lo, lo + n)

    sz_src, sz_dst = spans(nz, tz)
    sy_src, sy_dst = spans(ny, ty)
    sx_src, sx_dst = spans(nx, tx)
    out[sz_dst, sy_dst, sx_dst] = vol.data[sz_src, sy_src, sx_src]
    cls = Mask if isinstance(vol, Mask) else Volume
    return cls(out, vol.spacing, vol.axis_order)


def apply_affine(vol, t: Affine3, interp: Interp):
    """Backward-warp ``vol`` through ``t`` (physical mm, about the center).

    Output grid equals the input grid; samples falling outside the source
    take the pad value (volume minimum, 0 for masks).
    """
    trilinear = _interp_for(vol, interp)
    spacing = np.asarray(vol.spacing, dtype=np.float64)
    dims = np.asarray(vol.dims, dtype=np.float64)
    center = (dims - 1.0) / 2.0 * spacing
    inv = np.linalg.inv(t.linear)
    # output index -> physical -> inverse map -> input index
    matrix = (inv * spacing[None, :]) / spacing[:, None]
    offset = (inv @ (-center - t.translation) + center) / spacing
    data = kernels.affine_sample(
        vol.data, matrix, offset, vol.dims, trilinear,
        pad_value=_pad_value(vol), use_pad=True,
    )
    return _rebuild(vol, data)


def split_breasts(vol):
    """Split along the left-right (x) axis at floor(nx/2).

    The right half is mirrored along x so both halves share one canonical
    orientation.
    """
    nx = vol.dims[0]
    if nx < 2:
        raise ValueError("left-right axis must have length >= 2 to split")
    half = nx // 2
    left = vol.data[:, :, :half]
    right = vol.data[:, :, half:][:, :, ::-1]
    cls = Mask if isinstance(vol, Mask) else Volume
    return (
        cls(np.ascontiguousarray(left), vol.spacing, vol.axis_order),
        cls(np.ascontiguousarray(right), vol.spacing, vol.axis_order),
    )


def normalize_u8(vol: Volume) -> Volume:
    """Min-max map of intensities onto [0, 255]; constant input maps to zeros."""
    lo = float(vol.data.min())
    hi = float(vol.data.max())
    if hi == lo:
        return vol.with_data(np.zeros_like(vol.data))
    # divide-then-scale keeps the output exactly inside [0, 255]
    return vol.with_data((vol.data - lo) / (hi - lo) * 255.0)


def preprocess_volume(vol, prescale: float | None = None,
                      target_spacing_mm: float = DEFAULT_TARGET_SPACING_MM,
                      target_dims: tuple[int, int, int] = DEFAULT_TARGET_DIMS):
    """Standard preprocessing: reorient to axial, optional uniform prescale,
    split into breast halves, resample each half isotropically and crop/pad
    to the network grid. Returns (left, right).
    """
    if prescale is not None:
        prescale = float(prescale)
        if not (0.0 < prescale <= 1.0):
            raise ValueError(f"prescale must be in (0, 1], got {prescale!r}")
    interp = Interp.NEAREST if isinstance(vol, Mask) else Interp.TRILINEAR
    out = reorient_to_axial(vol)
    if prescale is not None and prescale != 1.0:
        out = apply_affine(out, Affine3(np.eye(3) * prescale, np.zeros(3)), interp)
    halves = split_breasts(out)
    result = []
    for half in halves:
        half = resample_isotropic(half, target_spacing_mm, interp)
        result.append(crop_or_pad(half, target_dims))
    return tuple(result)
