"""Shared phantom builders and small fixtures for the test suite."""

import struct

import numpy as np

from volaug.types import Mask, Volume


def ball(shape_zyx, center_xyz, radius, spacing=(1.0, 1.0, 1.0)) -> Mask:
    """Binary ball mask; center and radius in voxel units."""
    nz, ny, nx = shape_zyx
    cx, cy, cz = center_xyz
    z, y, x = np.ogrid[:nz, :ny, :nx]
    inside = (x - cx) ** 2 + (y - cy) ** 2 + (z - cz) ** 2 <= radius ** 2
    return Mask(inside.astype(np.uint8), spacing)


def smooth_phantom(n=64, spacing=(2.0, 2.0, 2.0)) -> Volume:
    """Smooth synthetic volume: an enveloped blob with gentle waves over a
    flat background, nearly constant at the faces so border effects of
    warp round-trips stay negligible."""
    z, y, x = np.ogrid[:n, :n, :n]
    c = (n - 1) / 2.0
    r2 = (x - c) ** 2 + (y - c) ** 2 + (z - c) ** 2
    envelope = np.exp(-r2 / (0.065 * n * n))
    waves = 20.0 * np.sin(2 * np.pi * x / n) * np.cos(2 * np.pi * y / n) \
        + 10.0 * np.sin(2 * np.pi * z / n)
    return Volume((200.0 + waves) * envelope + 30.0, spacing)


def affine_field_volume(dims_xyz, spacing) -> Volume:
    """Volume whose value is f(x,y,z) = x + 2y + 3z in physical mm."""
    nx, ny, nz = dims_xyz
    sx, sy, sz = spacing
    z, y, x = np.ogrid[:nz, :ny, :nx]
    data = (x * sx) + 2.0 * (y * sy) + 3.0 * (z * sz)
    return Volume(np.broadcast_to(data, (nz, ny, nx)).copy(), spacing)


def random_mask(rng, shape_zyx, density=0.4, spacing=(1.0, 1.0, 1.0)) -> Mask:
    return Mask((rng.random(shape_zyx) < density).astype(np.uint8), spacing)


class ConstantNoise:
    """Generator stub: constant uniform draws and a fixed sign decision."""

    def __init__(self, value=42.0, sign_draw=0.0):
        self.value = value
        self.sign_draw = sign_draw

    def uniform(self, lo, hi, size=None):
        return np.full(size, self.value)

    def random(self):
        return self.sign_draw


def write_minimal_nifti(path, data_xyz_f32, pixdim=(1.0, 1.0, 1.0),
                        datatype=16, scl_slope=0.0, scl_inter=0.0,
                        magic=b"n+1\x00", dim0=3):
    """Reference NIfTI-1 writer used only to build test fixtures.

    ``data_xyz_f32`` is (nz, ny, nx); written in the standard x-fastest
    order with a 348-byte header + 4 pad bytes.
    """
    nz, ny, nx = data_xyz_f32.shape
    header = bytearray(348)
    struct.pack_into("<i", header, 0, 348)
    struct.pack_into("<8h", header, 40, dim0, nx, ny, nz, 1, 1, 1, 1)
    dtype_map = {2: ("B", 8), 4: ("h", 16), 16: ("f", 32), 32: ("f", 64)}
    _, bitpix = dtype_map[datatype]
    struct.pack_into("<2h", header, 70, datatype, bitpix)
    struct.pack_into("<8f", header, 76, 1.0, *pixdim, 1.0, 1.0, 1.0, 1.0)
    struct.pack_into("<f", header, 108, 352.0)
    struct.pack_into("<f", header, 112, scl_slope)
    struct.pack_into("<f", header, 116, scl_inter)
    header[344:348] = magic
    np_dtype = {2: np.uint8, 4: np.int16, 16: np.float32, 32: np.complex64}[datatype]
    payload = np.ascontiguousarray(data_xyz_f32, dtype=np_dtype).tobytes()
    with open(path, "wb") as f:
        f.write(bytes(header))
        f.write(b"\x00\x00\x00\x00")
        f.write(payload)
