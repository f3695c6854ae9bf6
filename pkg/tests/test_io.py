import json

import numpy as np
import pytest
from helpers import write_minimal_nifti
from hypothesis import given, settings
from hypothesis import strategies as st

from volaug.errors import FormatError, ManifestError
from volaug.fileio import (Manifest, ManifestRecord, import_nifti1,
                           load_manifest, load_volume, read_native,
                           read_native_multi, save_manifest, write_native,
                           write_native_multi)
from volaug.types import Mask, Volume


def test_roundtrip_bit_identical(tmp_path):
    rng = np.random.default_rng(0)
    data = rng.random((7, 5, 9)).astype(np.float32).astype(np.float64)
    vol = Volume(data, (0.5, 1.25, 3.0))
    path = tmp_path / "v.vaug"
    write_native(vol, path)
    back = read_native(path)
    assert isinstance(back, Volume)
    assert back.dims == vol.dims
    assert back.spacing == vol.spacing
    assert np.array_equal(back.data, vol.data)


def test_mask_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    mask = Mask((rng.random((4, 6, 5)) < 0.5).astype(np.uint8), (2, 2, 2))
    path = tmp_path / "m.vaug"
    write_native(mask, path)
    back = read_native(path)
    assert isinstance(back, Mask)
    assert np.array_equal(back.data, mask.data)


@settings(max_examples=30, deadline=None)
@given(
    nx=st.integers(1, 6), ny=st.integers(1, 6), nz=st.integers(1, 6),
    sx=st.floats(0.1, 10), sy=st.floats(0.1, 10), sz=st.floats(0.1, 10),
    seed=st.integers(0, 2**32 - 1),
)
def test_roundtrip_property(tmp_path_factory, nx, ny, nz, sx, sy, sz, seed):
    rng = np.random.default_rng(seed)
    data = (rng.normal(size=(nz, ny, nx)) * 100).astype(np.float32)
    vol = Volume(data.astype(np.float64), (sx, sy, sz))
    path = tmp_path_factory.mktemp("rt") / "v.vaug"
    write_native(vol, path)
    back = read_native(path)
    assert back.dims == vol.dims
    assert back.spacing == vol.spacing
    assert np.array_equal(back.data, vol.data)


def test_minimal_record_layout(tmp_path):
    vol = Volume(np.full((1, 1, 1), 42.0), (1, 1, 1))
    path = tmp_path / "one.vaug"
    write_native(vol, path)
    raw = path.read_bytes()
    assert len(raw) == 44 + 4  # header + one float32 scalar
    assert raw[:4] == b"VAUG"
    back = read_native(path)
    assert back.dims == (1, 1, 1)
    assert back.data.ravel()[0] == 42.0


def test_bad_magic(tmp_path):
    path = tmp_path / "bad.vaug"
    path.write_bytes(b"NOPE" + b"\x00" * 60)
    with pytest.raises(FormatError, match="magic"):
        read_native(path)


def test_truncated_payload_and_version(tmp_path):
    vol = Volume(np.zeros((2, 2, 2)), (1, 1, 1))
    path = tmp_path / "v.vaug"
    write_native(vol, path)
    raw = path.read_bytes()
    path.write_bytes(raw[:-5])
    with pytest.raises(FormatError, match="truncated"):
        read_native(path)
    bad_version = bytearray(raw)
    bad_version[4] = 9
    path.write_bytes(bytes(bad_version))
    with pytest.raises(FormatError, match="version"):
        read_native(path)


def test_nonfinite_payload_rejected(tmp_path):
    vol = Volume(np.ones((1, 1, 2)), (1, 1, 1))
    path = tmp_path / "v.vaug"
    write_native(vol, path)
    raw = bytearray(path.read_bytes())
    raw[-4:] = np.float32(np.inf).tobytes()
    path.write_bytes(bytes(raw))
    with pytest.raises(FormatError, match="non-finite"):
        read_native(path)


def test_trailing_bytes_rejected_single_read(tmp_path):
    vol = Volume(np.zeros((1, 1, 1)), (1, 1, 1))
    path = tmp_path / "v.vaug"
    write_native_multi([vol, vol], path)
    with pytest.raises(FormatError, match="trailing"):
        read_native(path)
    records = read_native_multi(path)
    assert len(records) == 2


def test_int16_payload_roundtrip(tmp_path):
    data = np.arange(-8, 8, dtype=np.int16).reshape(2, 2, 4)
    vol = Volume(data.astype(np.float64), (1, 1, 1))
    path = tmp_path / "i16.vaug"
    write_native(vol, path, dtype=np.int16)
    back = read_native(path)
    assert np.array_equal(back.data, data.astype(np.float64))


# --- NIfTI import ------------------------------------------------------------

def test_nifti_minimal_import(tmp_path):
    rng = np.random.default_rng(2)
    data = rng.random((4, 4, 4)).astype(np.float32)
    path = tmp_path / "a.nii"
    write_minimal_nifti(path, data)
    vol = import_nifti1(path)
    assert vol.dims == (4, 4, 4)
    assert vol.spacing == (1.0, 1.0, 1.0)
    assert np.array_equal(vol.data, data.astype(np.float64))


def test_nifti_slope_intercept(tmp_path):
    data = np.full((1, 1, 1), 3, dtype=np.int16)
    path = tmp_path / "s.nii"
    write_minimal_nifti(path, data, datatype=4, scl_slope=2.0, scl_inter=1.0)
    vol = import_nifti1(path)
    assert vol.data.ravel()[0] == 7.0


def test_nifti_unsupported_datatype(tmp_path):
    data = np.zeros((2, 2, 2), dtype=np.float32)
    path = tmp_path / "c.nii"
    write_minimal_nifti(path, data, datatype=32)  # complex64
    with pytest.raises(FormatError, match="datatype"):
        import_nifti1(path)


def test_nifti_wrong_dim_count(tmp_path):
    data = np.zeros((2, 2, 2), dtype=np.float32)
    path = tmp_path / "d4.nii"
    write_minimal_nifti(path, data, dim0=4)
    with pytest.raises(FormatError, match="3 spatial dims"):
        import_nifti1(path)


def test_nifti_nonfinite_rejected(tmp_path):
    data = np.zeros((2, 2, 2), dtype=np.float32)
    data[0, 0, 0] = np.nan
    path = tmp_path / "nan.nii"
    write_minimal_nifti(path, data)
    with pytest.raises(FormatError, match="non-finite"):
        import_nifti1(path)


def test_nifti_mask_import(tmp_path):
    rng = np.random.default_rng(3)
    data = (rng.random((3, 3, 3)) < 0.5).astype(np.float32)
    path = tmp_path / "m.nii"
    write_minimal_nifti(path, data)
    mask = import_nifti1(path, as_mask=True)
    assert isinstance(mask, Mask)
    bad = tmp_path / "notmask.nii"
    write_minimal_nifti(bad, data * 3.0)
    with pytest.raises(FormatError):
        import_nifti1(bad, as_mask=True)


# --- Manifests ---------------------------------------------------------------

def _manifest_doc():
    return {
        "records": [
            {"id": "s1_img", "path": "s1.vaug", "kind": "image",
             "subject": "s1", "laterality": "whole", "group": "T1W-sag-FS"},
            {"id": "s2_img", "path": "s2.vaug", "kind": "image",
             "subject": "s2", "laterality": "whole", "group": "T1W-sag-FS"},
            {"id": "s1_mask", "path": "s1_m.vaug", "kind": "mask",
             "subject": "s1", "laterality": "whole", "group": "obs1"},
            {"id": "s2_mask", "path": "s2_m.vaug", "kind": "mask",
             "subject": "s2", "laterality": "whole", "group": "obs1"},
        ]
    }


def test_manifest_load_ok(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(_manifest_doc()))
    manifest = load_manifest(path)
    assert len(manifest.records) == 4
    assert len(manifest.images()) == 2
    assert manifest.by_id("s1_mask").kind == "mask"


def test_manifest_dangling_mask(tmp_path):
    doc = _manifest_doc()
    doc["records"][2]["subject"] = "unknown"
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(ManifestError, match="exactly one image"):
        load_manifest(path)


def test_manifest_duplicate_id(tmp_path):
    doc = _manifest_doc()
    doc["records"][1]["id"] = "s1_img"
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(ManifestError, match="duplicate"):
        load_manifest(path)


def test_manifest_missing_field(tmp_path):
    doc = _manifest_doc()
    del doc["records"][0]["group"]
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(ManifestError, match="missing"):
        load_manifest(path)


def test_manifest_empty_ok(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"records": []}))
    manifest = load_manifest(path)
    assert manifest.records == []


def test_manifest_roundtrip_preserves_origin_and_extras(tmp_path):
    rec = ManifestRecord("a", "a.vaug", "image", "s", "left", "g",
                         origin={"variant": "remap", "seed": 7})
    manifest = Manifest([rec], extras={"seed": 7, "geo_online": {"x": 1}})
    path = tmp_path / "m.json"
    save_manifest(manifest, path)
    back = load_manifest(path)
    assert back.extras["seed"] == 7
    assert back.by_id("a").origin == {"variant": "remap", "seed": 7}


def test_load_volume_dispatch(tmp_path):
    vol = Volume(np.ones((2, 2, 2)), (1, 1, 1))
    vpath = tmp_path / "v.vaug"
    write_native(vol, vpath)
    assert isinstance(load_volume(vpath), Volume)
    with pytest.raises(FormatError):
        load_volume(tmp_path / "v.unknown")
