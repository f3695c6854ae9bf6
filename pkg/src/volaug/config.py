"""The tunable augmentation parameter set exchanged between library, batch
CLI, preview service and the browser panel, plus its JSON schema.

The schema is what the tuning panel renders its controls from; every leaf
carries type, bounds and default so UI and CLI cannot drift.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .geo import GeoConfig
from .remap import RemapConfig
from .style import StyleConfig


@dataclass
class VariantCounts:
    style: int = 2
    remap: int = 2

    def __post_init__(self):
        self.style = int(self.style)
        self.remap = int(self.remap)
        if self.style < 0 or self.remap < 0:
            raise ValueError("variant counts must be >= 0")


@dataclass
class AugmentationConfig:
    seed: int = 0
    geo: GeoConfig = field(default_factory=GeoConfig)
    remap: RemapConfig = field(default_factory=RemapConfig)
    style: StyleConfig = field(default_factory=StyleConfig)
    per_volume_counts: VariantCounts = field(default_factory=VariantCounts)
    sample_ratio_original_to_augmented: tuple[int, int] = (1, 2)

    def __post_init__(self):
        self.seed = int(self.seed)
        if not (0 <= self.seed < 2 ** 64):
            raise ValueError("seed must fit in 64 bits")
        ratio = tuple(int(r) for r in self.sample_ratio_original_to_augmented)
        if len(ratio) != 2 or ratio[0] < 1 or ratio[1] < 0:
            raise ValueError(f"bad sampling ratio {ratio!r}")
        self.sample_ratio_original_to_augmented = ratio

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "geo": {
                "scale_range": list(self.geo.scale_range),
                "rot_range_deg": list(self.geo.rot_range_deg),
                "trans_inplane_mm": self.geo.trans_inplane_mm,
                "trans_slice_mm": self.geo.trans_slice_mm,
            },
            "remap": {
                "window": self.remap.window,
                "linear_weight": self.remap.linear_weight,
                "sign_random": self.remap.sign_random,
            },
            "style": {
                "alpha": self.style.alpha,
                "backend": dict(self.style.backend),
                "literal_eq1": self.style.literal_eq1,
            },
            "per_volume_counts": {
                "style": self.per_volume_counts.style,
                "remap": self.per_volume_counts.remap,
            },
            "sample_ratio_original_to_augmented":
                list(self.sample_ratio_original_to_augmented),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "AugmentationConfig":
        if not isinstance(doc, dict):
            raise ValueError("config must be a JSON object")
        known = {"seed", "geo", "remap", "style", "per_volume_counts",
                 "sample_ratio_original_to_augmented"}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        kwargs: dict = {}
        if "seed" in doc:
            kwargs["seed"] = doc["seed"]
        if "geo" in doc:
            kwargs["geo"] = GeoConfig(**doc["geo"])
        if "remap" in doc:
            kwargs["remap"] = RemapConfig(**doc["remap"])
        if "style" in doc:
            kwargs["style"] = StyleConfig(**doc["style"])
        if "per_volume_counts" in doc:
            kwargs["per_volume_counts"] = VariantCounts(**doc["per_volume_counts"])
        if "sample_ratio_original_to_augmented" in doc:
            kwargs["sample_ratio_original_to_augmented"] = \
                doc["sample_ratio_original_to_augmented"]
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ValueError(f"bad config: {exc}") from exc


def load_config(path) -> AugmentationConfig:
    with open(path, "r", encoding="utf-8") as f:
        return AugmentationConfig.from_dict(json.load(f))


def save_config(cfg: AugmentationConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(cfg.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")


def _num(title, default, minimum, maximum, integer=False, step=None):
    out = {
        "type": "integer" if integer else "number",
        "title": title,
        "default": default,
        "minimum": minimum,
        "maximum": maximum,
    }
    if step is not None:
        out["step"] = step
    return out


# Bounds are UI clamping ranges, wider than the defaults but still sane.
CONFIG_SCHEMA: dict = {
    "type": "object",
    "title": "Augmentation parameters",
    "properties": {
        "seed": _num("Random seed", 0, 0, 2 ** 53 - 1, integer=True, step=1),
        "geo": {
            "type": "object",
            "title": "Geometric",
            "properties": {
                "scale_range": {
                    "type": "range",
                    "title": "Scale factor range",
                    "default": [0.8, 1.2],
                    "minimum": 0.1,
                    "maximum": 3.0,
                    "step": 0.01,
                },
                "rot_range_deg": {
                    "type": "range",
                    "title": "Rotation range (deg, about slice axis)",
                    "default": [-5.0, 5.0],
                    "minimum": -45.0,
                    "maximum": 45.0,
                    "step": 0.5,
                },
                "trans_inplane_mm": _num("Max in-plane translation (mm)",
                                         10.0, 0.0, 50.0, step=0.5),
                "trans_slice_mm": _num("Max slice-axis translation (mm)",
                                       5.0, 0.0, 50.0, step=0.5),
            },
        },
        "remap": {
            "type": "object",
            "title": "Intensity remapping",
            "properties": {
                "window": _num("Moving-average window", 20, 1, 256,
                               integer=True, step=1),
                "linear_weight": _num("Linear component weight", 0.5, 0.0,
                                      5.0, step=0.05),
                "sign_random": {
                    "type": "boolean",
                    "title": "Random ramp sign",
                    "default": True,
                },
            },
        },
        "style": {
            "type": "object",
            "title": "Style transfer",
            "properties": {
                "alpha": _num("Image-style weight (alpha)", 0.5, 0.0, 1.0,
                              step=0.01),
                "literal_eq1": {
                    "type": "boolean",
                    "title": "Literal mixing form",
                    "default": False,
                },
                "backend": {
                    "type": "object",
                    "title": "Backend",
                    "readonly": True,
                    "default": {"name": "mock"},
                },
            },
        },
        "per_volume_counts": {
            "type": "object",
            "title": "Variants per volume",
            "properties": {
                "style": _num("Style variants", 2, 0, 16, integer=True, step=1),
                "remap": _num("Remap variants", 2, 0, 16, integer=True, step=1),
            },
        },
        "sample_ratio_original_to_augmented": {
            "type": "ratio",
            "title": "Original : augmented sampling ratio",
            "default": [1, 2],
            "minimum": 0,
            "maximum": 99,
        },
    },
}
