"""Volume I/O: the bit-exact native container, a read-only NIfTI-1 import
and JSON dataset manifests.

Native format (little-endian throughout):
    magic   4 bytes  b"VAUG"
    version u16      1
    dtype   u8       0 = uint8, 1 = int16, 2 = float32
    kind    u8       0 = image, 1 = mask
    dims    3 x u32  (nx, ny, nz)
    spacing 3 x f64  mm
    payload raw, row-major with z slowest

A file may contain several records back to back (used by the external style
backend protocol); ``read_native`` expects exactly one.
"""

from __future__ import annotations

import json
import os
import struct

import numpy as np

from .errors import FormatError, ManifestError
from .types import Mask, Volume

MAGIC = b"VAUG"
VERSION = 1
_HEADER = struct.Struct("<4sHBB3I3d")
_DTYPES = {0: np.dtype("<u1"), 1: np.dtype("<i2"), 2: np.dtype("<f4")}
_DTYPE_CODES = {np.dtype("uint8"): 0, np.dtype("int16"): 1, np.dtype("float32"): 2}

KIND_IMAGE = 0
KIND_MASK = 1


def write_record(f, vol, dtype=None) -> None:
    """Append one native record to an open binary stream."""
    is_mask = isinstance(vol, Mask)
    if dtype is None:
        dtype = np.uint8 if is_mask else np.float32
    code = _DTYPE_CODES.get(np.dtype(dtype))
    if code is None:
        raise FormatError(f"unsupported payload dtype {dtype!r}")
    nx, ny, nz = vol.dims
    f.write(_HEADER.pack(MAGIC, VERSION, code, KIND_MASK if is_mask else KIND_IMAGE,
                         nx, ny, nz, *vol.spacing))
    payload = np.ascontiguousarray(vol.data, dtype=_DTYPES[code])
    f.write(payload.tobytes())


def read_record(f):
    """Read one native record from an open binary stream; None at clean EOF."""
    header = f.read(_HEADER.size)
    if len(header) == 0:
        return None
    if len(header) < _HEADER.size:
        raise FormatError("truncated header")
    magic, version, dtype_code, kind, nx, ny, nz, sx, sy, sz = _HEADER.unpack(header)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    if dtype_code not in _DTYPES:
        raise FormatError(f"unknown dtype code {dtype_code}")
    if kind not in (KIND_IMAGE, KIND_MASK):
        raise FormatError(f"unknown kind code {kind}")
    dtype = _DTYPES[dtype_code]
    count = nx * ny * nz
    raw = f.read(count * dtype.itemsize)
    if len(raw) < count * dtype.itemsize:
        raise FormatError("truncated payload")
    data = np.frombuffer(raw, dtype=dtype).reshape(nz, ny, nx)
    if not np.isfinite(data).all():
        raise FormatError("payload contains non-finite values")
    try:
        if kind == KIND_MASK:
            return Mask(data, (sx, sy, sz))
        return Volume(data.astype(np.float64), (sx, sy, sz))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def write_native(vol, path, dtype=None) -> None:
    """Write a single Volume/Mask to a native file."""
    with open(path, "wb") as f:
        write_record(f, vol, dtype=dtype)


def read_native(path):
    """Read a single-record native file; trailing bytes are an error."""
    with open(path, "rb") as f:
        rec = read_record(f)
        if rec is None:
            raise FormatError("empty file")
        if f.read(1):
            raise FormatError("trailing bytes after payload")
    return rec


def write_native_multi(vols, path, dtype=None) -> None:
    with open(path, "wb") as f:
        for vol in vols:
            write_record(f, vol, dtype=dtype)


def read_native_multi(path):
    out = []
    with open(path, "rb") as f:
        while True:
            rec = read_record(f)
            if rec is None:
                return out
            out.append(rec)


# --- NIfTI-1 import (single-file .nii, 3 spatial dims, read-only) ----------

_NIFTI_DTYPES = {2: np.dtype("u1"), 4: np.dtype("i2"), 16: np.dtype("f4")}


def import_nifti1(path, as_mask: bool = False):
    """Import a single-file NIfTI-1 volume.

    Supported scalar types: uint8 (2), int16 (4), float32 (16). Orientation
    codes are ignored; the axis order is declared by the caller/manifest.
    scl_slope/scl_inter are applied when the slope is nonzero.
    """
    with open(path, "rb") as f:
        header = f.read(348)
        if len(header) < 348:
            raise FormatError("truncated NIfTI header")
        sizeof_hdr = struct.unpack("<i", header[:4])[0]
        if sizeof_hdr == 348:
            end = "<"
        elif struct.unpack(">i", header[:4])[0] == 348:
            end = ">"
        else:
            raise FormatError("not a NIfTI-1 file (bad sizeof_hdr)")
        magic = header[344:348]
        if magic[:3] not in (b"n+1", b"ni1"):
            raise FormatError(f"bad NIfTI magic {magic!r}")
        dim = struct.unpack(end + "8h", header[40:56])
        if dim[0] != 3:
            raise FormatError(f"expected 3 spatial dims, got dim[0]={dim[0]}")
        nx, ny, nz = dim[1], dim[2], dim[3]
        if min(nx, ny, nz) < 1:
            raise FormatError(f"non-positive dims {(nx, ny, nz)}")
        datatype, bitpix = struct.unpack(end + "2h", header[70:74])
        if datatype not in _NIFTI_DTYPES:
            raise FormatError(f"unsupported NIfTI datatype code {datatype}")
        dtype = _NIFTI_DTYPES[datatype].newbyteorder(end)
        if bitpix != dtype.itemsize * 8:
            raise FormatError(f"bitpix {bitpix} inconsistent with datatype {datatype}")
        pixdim = struct.unpack(end + "8f", header[76:108])
        spacing = (float(pixdim[1]), float(pixdim[2]), float(pixdim[3]))
        if not all(np.isfinite(s) and s > 0 for s in spacing):
            raise FormatError(f"invalid pixdim spacing {spacing}")
        vox_offset = struct.unpack(end + "f", header[108:112])[0]
        scl_slope = struct.unpack(end + "f", header[112:116])[0]
        scl_inter = struct.unpack(end + "f", header[116:120])[0]
        offset = int(vox_offset) if vox_offset else 352
        if magic[:3] == b"ni1":
            raise FormatError("two-file NIfTI (.hdr/.img) is not supported")
        f.seek(offset)
        count = nx * ny * nz
        raw = f.read(count * dtype.itemsize)
        if len(raw) < count * dtype.itemsize:
            raise FormatError("truncated NIfTI payload")
    data = np.frombuffer(raw, dtype=dtype).reshape(nz, ny, nx).astype(np.float64)
    if scl_slope not in (0.0,) and np.isfinite(scl_slope):
        data = data * float(scl_slope) + float(scl_inter)
    if not np.isfinite(data).all():
        raise FormatError("NIfTI payload contains non-finite values")
    if as_mask:
        if not np.isin(data, (0.0, 1.0)).all():
            raise FormatError("mask import requires values in {0, 1}")
        return Mask(data.astype(np.uint8), spacing)
    return Volume(data, spacing)


# --- Manifests --------------------------------------------------------------

KINDS = ("image", "mask")
LATERALITIES = ("left", "right", "whole")
_REQUIRED_FIELDS = ("id", "path", "kind", "subject", "laterality", "group")


class ManifestRecord:
    """One dataset entry. ``origin`` carries augmentation provenance when the
    record was produced by the pipeline; it is preserved verbatim."""

    __slots__ = ("id", "path", "kind", "subject", "laterality", "group",
                 "axis_order", "origin")

    def __init__(self, id, path, kind, subject, laterality, group,
                 axis_order="axial", origin=None):
        self.id = str(id)
        self.path = str(path)
        self.kind = str(kind)
        self.subject = str(subject)
        self.laterality = str(laterality)
        self.group = str(group)
        self.axis_order = str(axis_order)
        self.origin = origin
        if self.kind not in KINDS:
            raise ManifestError(f"record {self.id!r}: unknown kind {self.kind!r}")
        if self.laterality not in LATERALITIES:
            raise ManifestError(
                f"record {self.id!r}: unknown laterality {self.laterality!r}")

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in _REQUIRED_FIELDS}
        if self.axis_order != "axial":
            out["axis_order"] = self.axis_order
        if self.origin is not None:
            out["origin"] = self.origin
        return out

    def __repr__(self):
        return f"ManifestRecord(id={self.id!r}, kind={self.kind!r})"


def _is_anchor(rec) -> bool:
    """Whether an image record can anchor a mask: originals do, derived
    augmentation variants (style/remap) of the same subject do not."""
    if rec.origin is None:
        return True
    return rec.origin.get("variant", "original") == "original"


class Manifest:
    """Validated list of dataset records plus free-form extras.

    Invariants: ids are unique and every mask's subject+laterality matches
    exactly one (original) image record.
    """

    def __init__(self, records, base_dir=".", extras=None):
        self.records = list(records)
        self.base_dir = str(base_dir)
        self.extras = dict(extras or {})
        self._validate()

    def _validate(self):
        seen = set()
        images = {}
        for rec in self.records:
            if rec.id in seen:
                raise ManifestError(f"duplicate id {rec.id!r}")
            seen.add(rec.id)
            if rec.kind == "image" and _is_anchor(rec):
                key = (rec.subject, rec.laterality)
                images.setdefault(key, []).append(rec.id)
        for rec in self.records:
            if rec.kind != "mask":
                continue
            key = (rec.subject, rec.laterality)
            matches = images.get(key, [])
            if len(matches) != 1:
                raise ManifestError(
                    f"mask {rec.id!r} must match exactly one image for "
                    f"subject={rec.subject!r} laterality={rec.laterality!r}, "
                    f"found {len(matches)}")

    def images(self):
        return [r for r in self.records if r.kind == "image"]

    def masks(self):
        return [r for r in self.records if r.kind == "mask"]

    def by_id(self, rec_id: str) -> ManifestRecord:
        for rec in self.records:
            if rec.id == rec_id:
                return rec
        raise KeyError(rec_id)

    def resolve_path(self, rec: ManifestRecord) -> str:
        if os.path.isabs(rec.path):
            return rec.path
        return os.path.join(self.base_dir, rec.path)

    def to_dict(self) -> dict:
        out = dict(self.extras)
        out["records"] = [r.to_dict() for r in self.records]
        return out


def load_manifest(path) -> Manifest:
    """Load and validate a JSON manifest; relative record paths resolve
    against the manifest's directory."""
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "records" not in doc:
        raise ManifestError("manifest must be a JSON object with a 'records' list")
    raw_records = doc["records"]
    if not isinstance(raw_records, list):
        raise ManifestError("'records' must be a list")
    records = []
    for i, raw in enumerate(raw_records):
        if not isinstance(raw, dict):
            raise ManifestError(f"record {i} is not an object")
        missing = [k for k in _REQUIRED_FIELDS if k not in raw]
        if missing:
            raise ManifestError(f"record {i} missing fields {missing}")
        records.append(ManifestRecord(
            raw["id"], raw["path"], raw["kind"], raw["subject"],
            raw["laterality"], raw["group"],
            axis_order=raw.get("axis_order", "axial"),
            origin=raw.get("origin"),
        ))
    extras = {k: v for k, v in doc.items() if k != "records"}
    return Manifest(records, base_dir=os.path.dirname(os.path.abspath(path)),
                    extras=extras)


def save_manifest(manifest: Manifest, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")


def load_volume(path, as_mask: bool = False, axis_order: str = "axial"):
    """Load a volume or mask by file extension (.vaug native, .nii import)."""
    lower = str(path).lower()
    if lower.endswith(".vaug"):
        rec = read_native(path)
        if as_mask and not isinstance(rec, Mask):
            raise FormatError(f"{path}: expected a mask record")
        if not as_mask and isinstance(rec, Mask):
            raise FormatError(f"{path}: expected an image record")
    elif lower.endswith(".nii"):
        rec = import_nifti1(path, as_mask=as_mask)
    else:
        raise FormatError(f"unrecognized volume file extension: {path}")
    if axis_order != "axial":
        rec.axis_order = axis_order
    return rec
