"""Kernel backend selection.

The compiled Cython extension is used when available; otherwise the numpy
fallback. Set ``VOLAUG_DISABLE_EXT=1`` to force the fallback (used by the
benchmark and the backend-equivalence tests).
"""

import os

import numpy as np

from . import _numpy_impl

_IMPL = _numpy_impl
_BACKEND = "numpy"

if os.environ.get("VOLAUG_DISABLE_EXT", "") != "1":
    try:
        from . import _fast

        _IMPL = _fast
        _BACKEND = "cython"
    except ImportError:
        pass


def backend_name() -> str:
    """Which kernel backend was selected at import: "cython" or "numpy"."""
    return _BACKEND


def get_impl(name: str):
    """Fetch a specific backend module by name (for benchmarks/tests)."""
    if name == "numpy":
        return _numpy_impl
    if name == "cython":
        from . import _fast

        return _fast
    raise ValueError(f"unknown kernel backend {name!r}")


def affine_sample(src, matrix, offset, out_dims, trilinear, pad_value=0.0,
                  use_pad=True, impl=None):
    """Backward-warp sampling of ``src`` (z,y,x float64) onto a new grid.

    ``matrix`` (3x3) and ``offset`` (3,) map output index (x, y, z) to input
    index space. ``use_pad=False`` clamps out-of-grid coordinates instead of
    padding with ``pad_value``.
    """
    src = np.ascontiguousarray(src, dtype=np.float64)
    mat = np.ascontiguousarray(np.asarray(matrix, dtype=np.float64).reshape(9))
    off = np.ascontiguousarray(np.asarray(offset, dtype=np.float64).reshape(3))
    dims = (int(out_dims[0]), int(out_dims[1]), int(out_dims[2]))
    if min(dims) < 1:
        raise ValueError(f"output dims must be positive, got {dims}")
    fn = (impl or _IMPL).affine_sample
    return fn(src, mat, off, dims, bool(trilinear), float(pad_value), bool(use_pad))


def label_2d(mask, impl=None):
    """4-connected component labels of a 2D binary array, raster-scan order."""
    mask = np.ascontiguousarray(mask, dtype=np.uint8)
    if mask.ndim != 2:
        raise ValueError("label_2d expects a 2D array")
    return (impl or _IMPL).label_2d(mask)


def label_3d(mask, impl=None):
    """6-connected component labels of a 3D binary array, raster-scan order."""
    mask = np.ascontiguousarray(mask, dtype=np.uint8)
    if mask.ndim != 3:
        raise ValueError("label_3d expects a 3D array")
    return (impl or _IMPL).label_3d(mask)
