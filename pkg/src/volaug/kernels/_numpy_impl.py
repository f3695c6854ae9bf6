"""Pure numpy kernel implementations.

These mirror the compiled kernels in ``_fast.pyx`` operation for operation;
the interpolation arithmetic uses the exact same expression structure so
both backends produce identical floats (the extension is built without FMA
contraction).
"""

import numpy as np
from scipy import ndimage

_STRUCT_2D = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)  # 4-connectivity
_STRUCT_3D = ndimage.generate_binary_structure(3, 1)  # 6-connectivity


def affine_sample(src, mat, off, out_dims, trilinear, pad_value, use_pad):
    """Sample ``src`` at ``mat @ out_index + off`` for every output voxel.

    ``src`` is (nz, ny, nx) float64; ``mat`` is a flat row-major 3x3 mapping
    output index (x, y, z) to input index space; ``out_dims`` is (nx, ny, nz).
    ``use_pad`` selects constant padding outside the source grid; otherwise
    coordinates are clamped (edge replication).
    """
    onx, ony, onz = int(out_dims[0]), int(out_dims[1]), int(out_dims[2])
    nz, ny, nx = src.shape

    ox = np.arange(onx, dtype=np.float64)[None, None, :]
    oy = np.arange(ony, dtype=np.float64)[None, :, None]
    oz = np.arange(onz, dtype=np.float64)[:, None, None]

    xi = mat[0] * ox + mat[1] * oy + mat[2] * oz + off[0]
    yi = mat[3] * ox + mat[4] * oy + mat[5] * oz + off[1]
    zi = mat[6] * ox + mat[7] * oy + mat[8] * oz + off[2]
    xi = np.broadcast_to(xi, (onz, ony, onx)).copy() if xi.shape != (onz, ony, onx) else xi
    yi = np.broadcast_to(yi, (onz, ony, onx)).copy() if yi.shape != (onz, ony, onx) else yi
    zi = np.broadcast_to(zi, (onz, ony, onx)).copy() if zi.shape != (onz, ony, onx) else zi

    if use_pad:
        inside = (
            (xi >= 0.0) & (xi <= nx - 1.0)
            & (yi >= 0.0) & (yi <= ny - 1.0)
            & (zi >= 0.0) & (zi <= nz - 1.0)
        )
        xs = np.where(inside, xi, 0.0)
        ys = np.where(inside, yi, 0.0)
        zs = np.where(inside, zi, 0.0)
    else:
        xs = np.clip(xi, 0.0, nx - 1.0)
        ys = np.clip(yi, 0.0, ny - 1.0)
        zs = np.clip(zi, 0.0, nz - 1.0)

    flat = src.ravel()

    if trilinear:
        x0 = np.floor(xs)
        y0 = np.floor(ys)
        z0 = np.floor(zs)
        fx = xs - x0
        fy = ys - y0
        fz = zs - z0
        gx = 1.0 - fx
        gy = 1.0 - fy
        gz = 1.0 - fz
        ix0 = x0.astype(np.int64)
        iy0 = y0.astype(np.int64)
        iz0 = z0.astype(np.int64)
        ix1 = np.minimum(ix0 + 1, nx - 1)
        iy1 = np.minimum(iy0 + 1, ny - 1)
        iz1 = np.minimum(iz0 + 1, nz - 1)

        def at(iz, iy, ix):
            return flat[(iz * ny + iy) * nx + ix]

        c00 = at(iz0, iy0, ix0) * gx + at(iz0, iy0, ix1) * fx
        c10 = at(iz0, iy1, ix0) * gx + at(iz0, iy1, ix1) * fx
        c01 = at(iz1, iy0, ix0) * gx + at(iz1, iy0, ix1) * fx
        c11 = at(iz1, iy1, ix0) * gx + at(iz1, iy1, ix1) * fx
        c0 = c00 * gy + c10 * fy
        c1 = c01 * gy + c11 * fy
        out = c0 * gz + c1 * fz
    else:
        ix = np.floor(xs + 0.5).astype(np.int64)
        iy = np.floor(ys + 0.5).astype(np.int64)
        iz = np.floor(zs + 0.5).astype(np.int64)
        out = flat[(iz * ny + iy) * nx + ix]

    if use_pad:
        out = np.where(inside, out, pad_value)
    return np.ascontiguousarray(out)


def _canonical_labels(raw):
    """Relabel so components are numbered by first raster-scan occurrence."""
    flat = raw.ravel()
    fg = flat != 0
    vals = flat[fg]
    if vals.size == 0:
        return np.zeros(raw.shape, dtype=np.int32), 0
    uniq, first_idx = np.unique(vals, return_index=True)
    order = np.argsort(first_idx, kind="stable")
    remap = np.zeros(int(uniq.max()) + 1, dtype=np.int32)
    remap[uniq[order]] = np.arange(1, uniq.size + 1, dtype=np.int32)
    out = np.zeros(flat.shape, dtype=np.int32)
    out[fg] = remap[vals]
    return out.reshape(raw.shape), int(uniq.size)


def label_2d(mask):
    """4-connected labeling of a 2D uint8 mask; labels in raster-scan order."""
    raw, _ = ndimage.label(mask, structure=_STRUCT_2D)
    return _canonical_labels(raw)


def label_3d(mask):
    """6-connected labeling of a 3D uint8 mask; labels in raster-scan order."""
    raw, _ = ndimage.label(mask, structure=_STRUCT_3D)
    return _canonical_labels(raw)
