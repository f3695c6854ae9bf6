"""volaug: deterministic intensity and geometric augmentation for 3D
grayscale volumes, with preprocessing, mask curation, consensus evaluation
and nonparametric method comparison."""

from .config import AugmentationConfig, VariantCounts
from .core import (apply_affine, crop_or_pad, normalize_u8, preprocess_volume,
                   resample_isotropic, split_breasts)
from .geo import GeoConfig, GeoParams, geo_transform, sample_geo_params
from .metrics import StapleResult, dsc, interobserver_report, staple
from .remap import RemapConfig, RemapCurve, apply_remap, generate_remap_curve
from .seeding import derive_rng
from .style import (MockStyleBackend, StyleBackend, StyleConfig,
                    mix_embeddings, sample_style_embedding, stylize_volume)
from .types import Affine3, Interp, Mask, Volume

__version__ = "0.1.0"

__all__ = [
    "Affine3", "AugmentationConfig", "GeoConfig", "GeoParams", "Interp",
    "Mask", "MockStyleBackend", "RemapConfig", "RemapCurve", "StapleResult",
    "StyleBackend", "StyleConfig", "VariantCounts", "Volume",
    "apply_affine", "apply_remap", "crop_or_pad", "derive_rng", "dsc",
    "generate_remap_curve", "geo_transform", "interobserver_report",
    "mix_embeddings", "normalize_u8", "preprocess_volume",
    "resample_isotropic", "sample_geo_params", "sample_style_embedding",
    "split_breasts", "staple", "stylize_volume",
]
