# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: backward-warp resampling and connected-component labeling.

Arithmetic matches ``_numpy_impl`` expression for expression so both
backends return identical floats.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor

cnp.import_array()


def affine_sample(double[:, :, ::1] src, double[::1] mat, double[::1] off,
                  out_dims, bint trilinear, double pad_value, bint use_pad):
    cdef Py_ssize_t onx = <Py_ssize_t> out_dims[0]
    cdef Py_ssize_t ony = <Py_ssize_t> out_dims[1]
    cdef Py_ssize_t onz = <Py_ssize_t> out_dims[2]
    cdef Py_ssize_t nz = src.shape[0], ny = src.shape[1], nx = src.shape[2]
    cdef double m00 = mat[0], m01 = mat[1], m02 = mat[2]
    cdef double m10 = mat[3], m11 = mat[4], m12 = mat[5]
    cdef double m20 = mat[6], m21 = mat[7], m22 = mat[8]
    cdef double bx = off[0], by = off[1], bz = off[2]

    out_arr = np.empty((onz, ony, onx), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr

    cdef Py_ssize_t oxs, oys, ozs
    cdef double xi, yi, zi, xs, ys, zs
    cdef double fx, fy, fz, gx, gy, gz
    cdef double c00, c10, c01, c11, c0, c1
    cdef Py_ssize_t ix0, iy0, iz0, ix1, iy1, iz1, ix, iy, iz
    cdef double xmax = nx - 1.0, ymax = ny - 1.0, zmax = nz - 1.0

    for ozs in range(onz):
        for oys in range(ony):
            for oxs in range(onx):
                xi = m00 * oxs + m01 * oys + m02 * ozs + bx
                yi = m10 * oxs + m11 * oys + m12 * ozs + by
                zi = m20 * oxs + m21 * oys + m22 * ozs + bz
                if use_pad:
                    if (xi < 0.0 or xi > xmax or yi < 0.0 or yi > ymax
                            or zi < 0.0 or zi > zmax):
                        out[ozs, oys, oxs] = pad_value
                        continue
                    xs = xi; ys = yi; zs = zi
                else:
                    xs = xi if xi > 0.0 else 0.0
                    xs = xs if xs < xmax else xmax
                    ys = yi if yi > 0.0 else 0.0
                    ys = ys if ys < ymax else ymax
                    zs = zi if zi > 0.0 else 0.0
                    zs = zs if zs < zmax else zmax
                if trilinear:
                    fx = floor(xs); fy = floor(ys); fz = floor(zs)
                    ix0 = <Py_ssize_t> fx; iy0 = <Py_ssize_t> fy; iz0 = <Py_ssize_t> fz
                    fx = xs - fx; fy = ys - fy; fz = zs - fz
                    gx = 1.0 - fx; gy = 1.0 - fy; gz = 1.0 - fz
                    ix1 = ix0 + 1 if ix0 + 1 < nx else nx - 1
                    iy1 = iy0 + 1 if iy0 + 1 < ny else ny - 1
                    iz1 = iz0 + 1 if iz0 + 1 < nz else nz - 1
                    c00 = src[iz0, iy0, ix0] * gx + src[iz0, iy0, ix1] * fx
                    c10 = src[iz0, iy1, ix0] * gx + src[iz0, iy1, ix1] * fx
                    c01 = src[iz1, iy0, ix0] * gx + src[iz1, iy0, ix1] * fx
                    c11 = src[iz1, iy1, ix0] * gx + src[iz1, iy1, ix1] * fx
                    c0 = c00 * gy + c10 * fy
                    c1 = c01 * gy + c11 * fy
                    out[ozs, oys, oxs] = c0 * gz + c1 * fz
                else:
                    ix = <Py_ssize_t> floor(xs + 0.5)
                    iy = <Py_ssize_t> floor(ys + 0.5)
                    iz = <Py_ssize_t> floor(zs + 0.5)
                    out[ozs, oys, oxs] = src[iz, iy, ix]
    return out_arr


def label_2d(const unsigned char[:, ::1] mask):
    """4-connected labeling; labels numbered by first raster-scan occurrence."""
    cdef Py_ssize_t ny = mask.shape[0], nx = mask.shape[1]
    labels_arr = np.zeros((ny, nx), dtype=np.int32)
    cdef int[:, ::1] lab = labels_arr
    stack_arr = np.empty(ny * nx, dtype=np.int64)
    cdef long long[::1] st = stack_arr
    cdef Py_ssize_t top, y, x, cy, cx
    cdef long long idx
    cdef int current = 0

    for y in range(ny):
        for x in range(nx):
            if mask[y, x] != 0 and lab[y, x] == 0:
                current += 1
                lab[y, x] = current
                top = 0
                st[top] = y * nx + x
                top += 1
                while top > 0:
                    top -= 1
                    idx = st[top]
                    cy = idx / nx
                    cx = idx - cy * nx
                    if cy > 0 and mask[cy - 1, cx] != 0 and lab[cy - 1, cx] == 0:
                        lab[cy - 1, cx] = current
                        st[top] = idx - nx; top += 1
                    if cy + 1 < ny and mask[cy + 1, cx] != 0 and lab[cy + 1, cx] == 0:
                        lab[cy + 1, cx] = current
                        st[top] = idx + nx; top += 1
                    if cx > 0 and mask[cy, cx - 1] != 0 and lab[cy, cx - 1] == 0:
                        lab[cy, cx - 1] = current
                        st[top] = idx - 1; top += 1
                    if cx + 1 < nx and mask[cy, cx + 1] != 0 and lab[cy, cx + 1] == 0:
                        lab[cy, cx + 1] = current
                        st[top] = idx + 1; top += 1
    return labels_arr, current


def label_3d(const unsigned char[:, :, ::1] mask):
    """6-connected labeling; labels numbered by first raster-scan occurrence."""
    cdef Py_ssize_t nz = mask.shape[0], ny = mask.shape[1], nx = mask.shape[2]
    labels_arr = np.zeros((nz, ny, nx), dtype=np.int32)
    cdef int[:, :, ::1] lab = labels_arr
    stack_arr = np.empty(nz * ny * nx, dtype=np.int64)
    cdef long long[::1] st = stack_arr
    cdef Py_ssize_t top, z, y, x, cz, cy, cx
    cdef long long idx, plane = <long long> (ny * nx)
    cdef int current = 0

    for z in range(nz):
        for y in range(ny):
            for x in range(nx):
                if mask[z, y, x] != 0 and lab[z, y, x] == 0:
                    current += 1
                    lab[z, y, x] = current
                    top = 0
                    st[top] = (z * ny + y) * nx + x
                    top += 1
                    while top > 0:
                        top -= 1
                        idx = st[top]
                        cz = idx / plane
                        cy = (idx - cz * plane) / nx
                        cx = idx - cz * plane - cy * nx
                        if cz > 0 and mask[cz - 1, cy, cx] != 0 and lab[cz - 1, cy, cx] == 0:
                            lab[cz - 1, cy, cx] = current
                            st[top] = idx - plane; top += 1
                        if cz + 1 < nz and mask[cz + 1, cy, cx] != 0 and lab[cz + 1, cy, cx] == 0:
                            lab[cz + 1, cy, cx] = current
                            st[top] = idx + plane; top += 1
                        if cy > 0 and mask[cz, cy - 1, cx] != 0 and lab[cz, cy - 1, cx] == 0:
                            lab[cz, cy - 1, cx] = current
                            st[top] = idx - nx; top += 1
                        if cy + 1 < ny and mask[cz, cy + 1, cx] != 0 and lab[cz, cy + 1, cx] == 0:
                            lab[cz, cy + 1, cx] = current
                            st[top] = idx + nx; top += 1
                        if cx > 0 and mask[cz, cy, cx - 1] != 0 and lab[cz, cy, cx - 1] == 0:
                            lab[cz, cy, cx - 1] = current
                            st[top] = idx - 1; top += 1
                        if cx + 1 < nx and mask[cz, cy, cx + 1] != 0 and lab[cz, cy, cx + 1] == 0:
                            lab[cz, cy, cx + 1] = current
                            st[top] = idx + 1; top += 1
    return labels_arr, current
