"""Local HTTP preview service for the tuning panel.

A read-only view over a served manifest: it lists volumes, renders slices,
applies candidate augmentation parameters on demand and exports configs.
The only write it ever performs is config export, to an explicit
user-chosen path under the served workspace.

Preview requests derive their random streams exactly like the batch
pipeline does for variant index 0, i.e. from (seed, volume id, kind, 0), so
an exported config reproduces the previewed augmentation bit-exactly.
"""

from __future__ import annotations

import base64
import json
import os

from fastapi import FastAPI, HTTPException
from fastapi.responses import Response
from fastapi.staticfiles import StaticFiles

from .config import CONFIG_SCHEMA, AugmentationConfig
from .fileio import load_manifest, load_volume
from .geo import GeoConfig, geo_transform, sample_geo_params
from .remap import RemapConfig, apply_remap, generate_remap_curve
from .render import AXES, slice_count, slice_png
from .seeding import derive_rng
from .style import StyleConfig, make_backend, stylize_volume

_FRAGMENT_KEYS = ("style", "remap", "geo")


def apply_fragment(vol, volume_id: str, fragment: dict, seed: int, backend):
    """Apply the augmentation kinds present in ``fragment`` to a volume.

    Kinds compose in pipeline order: style, then remap, then (online)
    geometric. Returns (augmented volume, remap curve or None).
    """
    unknown = set(fragment) - set(_FRAGMENT_KEYS)
    if unknown:
        raise ValueError(f"unknown fragment keys: {sorted(unknown)}")
    out = vol
    curve = None
    if "style" in fragment:
        cfg = StyleConfig(**{"backend": {"name": backend.name},
                             **fragment["style"]})
        rng = derive_rng(seed, volume_id, "style", 0)
        out = stylize_volume(out, cfg, rng, backend)
    if "remap" in fragment:
        cfg = RemapConfig(**fragment["remap"])
        rng = derive_rng(seed, volume_id, "remap", 0)
        curve = generate_remap_curve(rng, cfg, seed=seed)
        out = apply_remap(out, curve)
    if "geo" in fragment:
        cfg = GeoConfig(**fragment["geo"])
        rng = derive_rng(seed, volume_id, "geo", 0)
        out = geo_transform(out, sample_geo_params(rng, cfg))
    return out, curve


def create_app(manifest_path, workspace, static_dir=None) -> FastAPI:
    manifest = load_manifest(manifest_path)
    workspace = os.path.abspath(workspace)
    os.makedirs(workspace, exist_ok=True)
    backend = make_backend({"name": "mock"})

    # dataset is loaded once at startup and treated as immutable
    volumes = {}
    for rec in manifest.images():
        volumes[rec.id] = load_volume(manifest.resolve_path(rec),
                                      axis_order=rec.axis_order)

    app = FastAPI(title="volaug preview service")

    @app.get("/api/schema")
    def get_schema():
        return {"config_schema": CONFIG_SCHEMA, "backend": backend.name}

    @app.get("/api/volumes")
    def get_volumes():
        out = []
        for rec in manifest.images():
            vol = volumes[rec.id]
            nx, ny, nz = vol.dims
            out.append({
                "id": rec.id,
                "subject": rec.subject,
                "laterality": rec.laterality,
                "group": rec.group,
                "dims": [nx, ny, nz],
                "slices": {"x": nx, "y": ny, "z": nz},
            })
        return {"volumes": out, "backend": backend.name}

    def _get_volume(volume_id):
        vol = volumes.get(volume_id)
        if vol is None:
            raise HTTPException(status_code=404, detail=f"unknown volume {volume_id!r}")
        return vol

    @app.get("/api/volumes/{volume_id}/slices/{axis}/{index}")
    def get_slice(volume_id: str, axis: str, index: int):
        vol = _get_volume(volume_id)
        if axis not in AXES:
            raise HTTPException(status_code=422, detail=f"axis must be one of {AXES}")
        if not 0 <= index < slice_count(vol, axis):
            raise HTTPException(status_code=404, detail="slice index out of range")
        return Response(content=slice_png(vol, axis, index), media_type="image/png")

    @app.post("/api/preview")
    def post_preview(body: dict):
        for field in ("volume_id", "axis", "index"):
            if field not in body:
                raise HTTPException(status_code=422, detail=f"missing field {field!r}")
        vol = _get_volume(body["volume_id"])
        axis = body["axis"]
        if axis not in AXES:
            raise HTTPException(status_code=422, detail=f"axis must be one of {AXES}")
        index = int(body["index"])
        if not 0 <= index < slice_count(vol, axis):
            raise HTTPException(status_code=404, detail="slice index out of range")
        seed = int(body.get("seed", 0))
        fragment = body.get("fragment", {})
        if not isinstance(fragment, dict):
            raise HTTPException(status_code=422, detail="fragment must be an object")
        try:
            augmented, curve = apply_fragment(vol, body["volume_id"], fragment,
                                              seed, backend)
        except (ValueError, TypeError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        original_png = slice_png(vol, axis, index)
        augmented_png = slice_png(augmented, axis, index)
        return {
            "original_png_b64": base64.b64encode(original_png).decode("ascii"),
            "augmented_png_b64": base64.b64encode(augmented_png).decode("ascii"),
            "remap_curve": curve.as_list() if curve is not None else None,
            "backend": backend.name,
        }

    @app.post("/api/export")
    def post_export(body: dict):
        if "path" not in body or "config" not in body:
            raise HTTPException(status_code=422,
                                detail="body must carry 'path' and 'config'")
        try:
            cfg = AugmentationConfig.from_dict(body["config"])
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        rel = str(body["path"])
        target = os.path.abspath(os.path.join(workspace, rel))
        if os.path.commonpath([workspace, target]) != workspace:
            raise HTTPException(status_code=422,
                                detail="export path must stay inside the workspace")
        os.makedirs(os.path.dirname(target), exist_ok=True)
        with open(target, "w", encoding="utf-8") as f:
            json.dump(cfg.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")
        return {"path": os.path.relpath(target, workspace), "config": cfg.to_dict()}

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
