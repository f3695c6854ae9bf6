"""Batch command-line interface.

Subcommands: preprocess, augment, curate, postprocess, evaluate, consensus,
stats, serve. Configuration is one JSON document matching
AugmentationConfig; --seed overrides the config seed; --dry-run prints the
planned outputs without writing.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from .config import AugmentationConfig, load_config
from .curation import cut_inferior_fat, remove_disconnected_2d, trim_lateral_boundary
from .fileio import (Manifest, ManifestRecord, load_manifest, read_native,
                     save_manifest, write_native)
from .metrics import dsc, staple
from .pipeline import build_training_set, match_predictions, plan_outputs, preprocess_record
from .postprocess import postprocess_qin
from .stats import ScoreMatrix, compare_methods
from .types import Mask


def _load_mask(path) -> Mask:
    rec = read_native(path)
    if not isinstance(rec, Mask):
        raise SystemExit(f"{path}: expected a mask file")
    return rec


def cmd_preprocess(args):
    manifest = load_manifest(args.manifest)
    os.makedirs(args.out, exist_ok=True)
    records = []
    for rec in manifest.records:
        halves = preprocess_record(manifest, rec, prescale=args.prescale)
        for side, vol in halves:
            name = f"{rec.id}_{side}" if rec.laterality == "whole" else rec.id
            if args.dry_run:
                print(os.path.join(args.out, f"{name}.vaug"))
                continue
            write_native(vol, os.path.join(args.out, f"{name}.vaug"))
            records.append(ManifestRecord(
                name, f"{name}.vaug", rec.kind, rec.subject, side, rec.group))
    if args.dry_run:
        return 0
    out_manifest = Manifest(records, base_dir=args.out)
    save_manifest(out_manifest, os.path.join(args.out, "preprocessed_manifest.json"))
    print(f"wrote {len(records)} volumes to {args.out}")
    return 0


def cmd_augment(args):
    manifest = load_manifest(args.manifest)
    cfg = load_config(args.config) if args.config else AugmentationConfig()
    if args.seed is not None:
        doc = cfg.to_dict()
        doc["seed"] = args.seed
        cfg = AugmentationConfig.from_dict(doc)
    if args.dry_run:
        for path in plan_outputs(manifest, cfg):
            print(os.path.join(args.out, path))
        return 0
    failures = []

    def on_error(rec, exc, tb):
        failures.append((rec.id, str(exc)))
        print(f"error on {rec.id}: {exc}", file=sys.stderr)

    out = build_training_set(manifest, cfg, args.out, prescale=args.prescale,
                             jobs=args.jobs, on_error=on_error)
    print(f"wrote {len(out.records)} records to {args.out}")
    if failures:
        print(f"{len(failures)} input volumes failed", file=sys.stderr)
        return 1
    return 0


def cmd_curate(args):
    mask = _load_mask(args.input)
    steps = []
    if args.remove_disconnected:
        steps.append("remove_disconnected")
        mask = remove_disconnected_2d(mask)
    if args.cut_fat:
        steps.append("cut_fat")
        mask = cut_inferior_fat(mask,
                                inferior_low_z=args.inferior_dir == "low",
                                posterior_high_y=args.posterior_dir == "high")
    if args.trim_lateral:
        steps.append("trim_lateral")
        mask = trim_lateral_boundary(mask, chest_low_x=args.chest_dir == "low")
    if not steps:
        raise SystemExit("no curation steps enabled "
                         "(--remove-disconnected/--cut-fat/--trim-lateral)")
    write_native(mask, args.output)
    print(f"applied {'+'.join(steps)} -> {args.output}")
    return 0


def cmd_postprocess(args):
    mask = _load_mask(args.input)
    cleaned = postprocess_qin(mask, min_area_px=args.min_area,
                              left_low_x=args.left_dir == "low")
    write_native(cleaned, args.output)
    print(f"postprocessed {args.input} -> {args.output}")
    return 0


def cmd_evaluate(args):
    pred = load_manifest(args.pred)
    ref = load_manifest(args.ref)
    rows = []
    for scan_id, method, pred_rec, ref_rec in match_predictions(pred, ref):
        score = dsc(_load_mask(pred.resolve_path(pred_rec)),
                    _load_mask(ref.resolve_path(ref_rec)))
        rows.append((scan_id, method, score))
    rows.sort()
    with open(args.out, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["scan", "method", "dsc"])
        for scan_id, method, score in rows:
            writer.writerow([scan_id, method, f"{score:.6f}"])
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def cmd_consensus(args):
    masks = [_load_mask(p) for p in args.inputs]
    result = staple(masks, init_pq=args.init_pq, tol=args.tol,
                    max_iter=args.max_iter)
    write_native(result.consensus, args.out)
    summary = {
        "raters": len(masks),
        "iterations": result.iterations,
        "converged": result.converged,
        "sensitivities": [float(v) for v in result.sensitivities],
        "specificities": [float(v) for v in result.specificities],
    }
    print(json.dumps(summary, indent=2))
    if args.report:
        with open(args.report, "w", encoding="utf-8") as f:
            json.dump(summary, f, indent=2)
    return 0


def _scores_from_csv(path) -> ScoreMatrix:
    cells: dict = {}
    scans: list = []
    methods: list = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        for required in ("scan", "method", "dsc"):
            if required not in (reader.fieldnames or []):
                raise SystemExit(f"{path}: missing column {required!r}")
        for row in reader:
            scan, method = row["scan"], row["method"]
            if scan not in scans:
                scans.append(scan)
            if method not in methods:
                methods.append(method)
            cells[(scan, method)] = float(row["dsc"])
    missing = [(s, m) for s in scans for m in methods if (s, m) not in cells]
    if missing:
        raise SystemExit(f"incomplete blocks: missing {missing[:5]}"
                         f"{'...' if len(missing) > 5 else ''}")
    scores = np.array([[cells[(s, m)] for m in methods] for s in scans])
    return ScoreMatrix(scores, methods)


def cmd_stats(args):
    matrix = _scores_from_csv(args.scores)
    report = compare_methods(matrix, alpha=args.alpha)
    doc = report.to_dict()
    with open(f"{args.out_prefix}.json", "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2)
    with open(f"{args.out_prefix}.csv", "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow([""] + report.labels)
        if report.pairwise_p is None:
            for label in report.labels:
                writer.writerow([label] + [""] * len(report.labels))
        else:
            for i, label in enumerate(report.labels):
                writer.writerow([label] +
                                [f"{p:.6g}" for p in report.pairwise_p[i]])
    print(json.dumps({"friedman": doc["friedman"],
                      "pairwise": report.pairwise_p is not None}))
    return 0


def cmd_serve(args):
    import uvicorn

    from .server import create_app

    app = create_app(args.manifest, args.workspace, static_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="volaug")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="preprocess a manifest onto the canonical grid")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--prescale", type=float, default=None)
    p.add_argument("--dry-run", action="store_true")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("augment", help="materialize an augmented training set")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None, help="AugmentationConfig JSON")
    p.add_argument("--seed", type=int, default=None, help="override config seed")
    p.add_argument("--prescale", type=float, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--dry-run", action="store_true")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("curate", help="ground-truth mask cleanup")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--remove-disconnected", action="store_true")
    p.add_argument("--cut-fat", action="store_true")
    p.add_argument("--trim-lateral", action="store_true")
    p.add_argument("--inferior-dir", choices=("low", "high"), default="low",
                   help="which z end is inferior")
    p.add_argument("--posterior-dir", choices=("low", "high"), default="high",
                   help="which y end is posterior")
    p.add_argument("--chest-dir", choices=("low", "high"), default="low",
                   help="which x end is the chest side")
    p.set_defaults(func=cmd_curate)

    p = sub.add_parser("postprocess", help="prediction cleanup")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--min-area", type=int, default=100)
    p.add_argument("--left-dir", choices=("low", "high"), default="low",
                   help="which x end is left")
    p.set_defaults(func=cmd_postprocess)

    p = sub.add_parser("evaluate", help="DSC of predictions vs references")
    p.add_argument("--pred", required=True, help="prediction manifest")
    p.add_argument("--ref", required=True, help="reference manifest")
    p.add_argument("--out", required=True, help="CSV output (scan,method,dsc)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("consensus", help="STAPLE consensus of rater masks")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None)
    p.add_argument("--init-pq", type=float, default=0.99)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=100)
    p.set_defaults(func=cmd_consensus)

    p = sub.add_parser("stats", help="Friedman + ties-aware Dunn/Bonferroni")
    p.add_argument("--scores", required=True, help="CSV from `evaluate`")
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="run the preview service")
    p.add_argument("--manifest", required=True)
    p.add_argument("--workspace", required=True)
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui", default=None, help="directory of built UI assets")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
