"""Config-driven batch pipeline: preprocess datasets and materialize
augmented training sets.

Intensity variants (style, remap) are generated offline, each from its own
random stream derived from (seed, volume id, kind, variant index), so the
output bytes are a pure function of (manifest, config) regardless of
parallelism or processing order. Geometric augmentation stays online: it is
recorded in the output manifest and applied by consumers at load time via
``sample_geo_params``/``geo_transform``.
"""

from __future__ import annotations

import os
import traceback
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import core
from .config import AugmentationConfig
from .fileio import Manifest, ManifestRecord, load_volume, save_manifest, write_native
from .remap import apply_remap, generate_remap_curve
from .seeding import derive_rng
from .style import StyleBackend, make_backend, stylize_volume
from .types import Interp, Mask


def _conform_half(vol, target_spacing, target_dims):
    """Bring an already-split half onto the canonical grid (no split/mirror)."""
    interp = Interp.NEAREST if isinstance(vol, Mask) else Interp.TRILINEAR
    vol = core.reorient_to_axial(vol)
    vol = core.resample_isotropic(vol, target_spacing, interp)
    return core.crop_or_pad(vol, target_dims)


def preprocess_record(manifest, rec, prescale=None,
                      target_spacing=core.DEFAULT_TARGET_SPACING_MM,
                      target_dims=core.DEFAULT_TARGET_DIMS):
    """Load one manifest record and return [(laterality, volume), ...] on the
    canonical grid. Whole volumes are split; pre-split halves are conformed."""
    vol = load_volume(manifest.resolve_path(rec), as_mask=(rec.kind == "mask"),
                      axis_order=rec.axis_order)
    if rec.laterality == "whole":
        left, right = core.preprocess_volume(
            vol, prescale=prescale, target_spacing_mm=target_spacing,
            target_dims=target_dims)
        return [("left", left), ("right", right)]
    half = _conform_half(vol, target_spacing, target_dims)
    return [(rec.laterality, half)]


def _masks_for(manifest, image_rec):
    return [r for r in manifest.masks()
            if r.subject == image_rec.subject
            and r.laterality == image_rec.laterality]


def plan_outputs(manifest: Manifest, cfg: AugmentationConfig) -> list:
    """Relative output paths ``build_training_set`` would write (dry run)."""
    paths = []
    for rec in manifest.images():
        sides = ["left", "right"] if rec.laterality == "whole" else [None]
        for side in sides:
            base = f"{rec.id}_{side}" if side else rec.id
            paths.append(f"{base}.vaug")
            paths.extend(f"{base}_style{v}.vaug"
                         for v in range(cfg.per_volume_counts.style))
            paths.extend(f"{base}_remap{v}.vaug"
                         for v in range(cfg.per_volume_counts.remap))
            for mask_rec in _masks_for(manifest, rec):
                suffix = f"_{side}" if side else ""
                paths.append(f"{mask_rec.id}{suffix}.vaug")
    paths.append("augmented_manifest.json")
    return paths


def _augment_one(manifest, rec, cfg, out_dir, prescale, backend):
    """Process one image record; returns its output manifest records."""
    records = []
    halves = preprocess_record(manifest, rec, prescale=prescale)
    mask_halves = {}
    for mask_rec in _masks_for(manifest, rec):
        for side, mask in preprocess_record(manifest, mask_rec, prescale=prescale):
            suffix = f"_{side}" if rec.laterality == "whole" else ""
            mask_halves.setdefault(side, []).append((f"{mask_rec.id}{suffix}", mask, mask_rec))

    for side, vol in halves:
        base = f"{rec.id}_{side}" if rec.laterality == "whole" else rec.id
        laterality = side
        write_native(vol, os.path.join(out_dir, f"{base}.vaug"))
        records.append(ManifestRecord(
            base, f"{base}.vaug", "image", rec.subject, laterality, rec.group,
            origin={"variant": "original", "source_id": rec.id}))

        for name, mask, mask_rec in mask_halves.get(side, []):
            write_native(mask, os.path.join(out_dir, f"{name}.vaug"))
            records.append(ManifestRecord(
                name, f"{name}.vaug", "mask", rec.subject, laterality,
                mask_rec.group,
                origin={"variant": "original", "source_id": mask_rec.id}))

        for v in range(cfg.per_volume_counts.style):
            rng = derive_rng(cfg.seed, base, "style", v)
            styled = stylize_volume(vol, cfg.style, rng, backend)
            name = f"{base}_style{v}"
            write_native(styled, os.path.join(out_dir, f"{name}.vaug"))
            records.append(ManifestRecord(
                name, f"{name}.vaug", "image", rec.subject, laterality,
                rec.group,
                origin={"variant": "style", "source_id": rec.id,
                        "seed": cfg.seed, "stream": [base, "style", v],
                        "alpha": cfg.style.alpha,
                        "backend": cfg.style.backend.get("name")}))

        for v in range(cfg.per_volume_counts.remap):
            rng = derive_rng(cfg.seed, base, "remap", v)
            curve = generate_remap_curve(rng, cfg.remap, seed=cfg.seed)
            remapped = apply_remap(vol, curve)
            name = f"{base}_remap{v}"
            write_native(remapped, os.path.join(out_dir, f"{name}.vaug"))
            records.append(ManifestRecord(
                name, f"{name}.vaug", "image", rec.subject, laterality,
                rec.group,
                origin={"variant": "remap", "source_id": rec.id,
                        "seed": cfg.seed, "stream": [base, "remap", v],
                        "window": cfg.remap.window,
                        "linear_weight": cfg.remap.linear_weight,
                        "sign": curve.sign}))
    return records


def build_training_set(manifest: Manifest, cfg: AugmentationConfig, out_dir,
                       prescale: float | None = None,
                       backend: StyleBackend | None = None,
                       jobs: int | None = None,
                       on_error=None) -> Manifest:
    """Materialize originals plus per-half style/remap variants under
    ``out_dir`` and return (and save) the augmented manifest.

    Failures on individual inputs are reported through ``on_error`` (default:
    re-raise) and the remaining volumes still run.
    """
    backend = backend or make_backend(cfg.style.backend)
    os.makedirs(out_dir, exist_ok=True)
    images = manifest.images()
    results: list = [None] * len(images)

    def run(i, rec):
        try:
            results[i] = _augment_one(manifest, rec, cfg, out_dir, prescale, backend)
        except Exception as exc:
            if on_error is None:
                raise
            on_error(rec, exc, traceback.format_exc())
            results[i] = []

    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs <= 1 or len(images) <= 1:
        for i, rec in enumerate(images):
            run(i, rec)
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run, i, rec) for i, rec in enumerate(images)]
            for fut in futures:
                fut.result()

    # output order follows the input manifest, never completion order
    records = [r for recs in results for r in (recs or [])]
    extras = {
        "seed": cfg.seed,
        "geo_online": {
            "scale_range": list(cfg.geo.scale_range),
            "rot_range_deg": list(cfg.geo.rot_range_deg),
            "trans_inplane_mm": cfg.geo.trans_inplane_mm,
            "trans_slice_mm": cfg.geo.trans_slice_mm,
        },
        "sample_ratio_original_to_augmented":
            list(cfg.sample_ratio_original_to_augmented),
    }
    out = Manifest(records, base_dir=out_dir, extras=extras)
    save_manifest(out, os.path.join(out_dir, "augmented_manifest.json"))
    return out


def sample_training_batch(aug_manifest: Manifest, rng: np.random.Generator,
                          batch_size: int, ratio=None) -> list:
    """Draw ids mixing originals and augmented variants at the configured
    ratio (default 1:2 -> P(original) = 1/3), uniformly within each kind."""
    if ratio is None:
        ratio = aug_manifest.extras.get("sample_ratio_original_to_augmented", (1, 2))
    r_orig, r_aug = int(ratio[0]), int(ratio[1])
    if r_orig < 1 or r_aug < 0:
        raise ValueError(f"bad sampling ratio {ratio!r}")

    def variant(rec):
        return (rec.origin or {}).get("variant", "original")

    originals = [r.id for r in aug_manifest.images() if variant(r) == "original"]
    augmented = [r.id for r in aug_manifest.images() if variant(r) != "original"]
    p_orig = r_orig / (r_orig + r_aug)
    if p_orig > 0 and not originals:
        raise ValueError("no original volumes to sample")
    if p_orig < 1 and not augmented:
        raise ValueError("no augmented volumes to sample")

    out = []
    for _ in range(int(batch_size)):
        pool = originals if rng.random() < p_orig else augmented
        out.append(pool[int(rng.integers(0, len(pool)))])
    return out


def match_predictions(pred_manifest: Manifest, ref_manifest: Manifest):
    """Pair prediction masks to reference masks by subject+laterality.

    Yields (scan_id, method, pred_record, ref_record); the prediction's
    group names the method.
    """
    refs = {}
    for rec in ref_manifest.masks():
        key = (rec.subject, rec.laterality)
        if key in refs:
            raise ValueError(f"multiple reference masks for {key}")
        refs[key] = rec
    for rec in pred_manifest.masks():
        key = (rec.subject, rec.laterality)
        if key not in refs:
            raise ValueError(f"no reference mask for {key}")
        scan_id = f"{rec.subject}_{rec.laterality}"
        yield scan_id, rec.group, rec, refs[key]
