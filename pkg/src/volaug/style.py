"""Style-based augmentation orchestration.

The actual style-transfer network is a pluggable backend behind
``StyleBackend``; the orchestration here owns everything around it:
embedding sampling and mixing, gray<->RGB conversion, per-slice invocation
with one volume-constant style embedding, and restacking.

The built-in mock backend is a deterministic, weight-free stand-in: it
perturbs each channel by a smooth function of the pixel value, linearly
driven by the embedding, and is the identity at embedding zero. That is
enough to exercise every piece of orchestration math.
"""

from __future__ import annotations

import json
import math
import os
import shutil
import subprocess
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .core import normalize_u8
from .errors import BackendError, BackendProtocolError
from .fileio import read_native_multi, write_native_multi
from .types import Volume

EMBEDDING_DIM = 100


def sample_style_embedding(rng: np.random.Generator) -> np.ndarray:
    """100 i.i.d. standard-normal draws."""
    return np.asarray(rng.standard_normal(EMBEDDING_DIM), dtype=np.float64)


def mix_embeddings(alpha: float, s_random: np.ndarray, s_image: np.ndarray,
                   literal: bool = False) -> np.ndarray:
    """Blend a random embedding with the image's own embedding.

    Default is the convex combination (1-alpha)*s_random + alpha*s_image.
    ``literal=True`` uses (alpha-1)*s_random + alpha*s_image instead; for
    zero-mean symmetric s_random the two are identical in distribution.
    """
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    s_random = np.asarray(s_random, dtype=np.float64)
    s_image = np.asarray(s_image, dtype=np.float64)
    if s_random.shape != s_image.shape:
        raise ValueError("embedding shapes differ")
    coeff = (alpha - 1.0) if literal else (1.0 - alpha)
    return coeff * s_random + alpha * s_image


def gray_to_rgb(slice2d: np.ndarray) -> np.ndarray:
    """Replicate a [0, 255] grayscale slice into three identical channels."""
    slice2d = np.asarray(slice2d, dtype=np.float64)
    if slice2d.ndim != 2:
        raise ValueError("expected a 2D slice")
    if slice2d.min(initial=0.0) < 0.0 or slice2d.max(initial=0.0) > 255.0:
        raise ValueError("slice values must lie in [0, 255]")
    return np.repeat(slice2d[:, :, None], 3, axis=2)


def rgb_to_gray(rgb: np.ndarray) -> np.ndarray:
    """Luma conversion: (299*R + 587*G + 114*B) / 1000."""
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError("expected an (ny, nx, 3) slice")
    return (299.0 * rgb[:, :, 0] + 587.0 * rgb[:, :, 1] + 114.0 * rgb[:, :, 2]) / 1000.0


@dataclass
class StyleConfig:
    alpha: float = 0.5
    backend: dict = field(default_factory=lambda: {"name": "mock"})
    literal_eq1: bool = False

    def __post_init__(self):
        self.alpha = float(self.alpha)
        self.literal_eq1 = bool(self.literal_eq1)
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not isinstance(self.backend, dict) or "name" not in self.backend:
            raise ValueError("backend must be a dict with a 'name' entry")


class StyleBackend:
    """Contract: given an RGB slice (or stack) and an embedding, produce an
    RGB slice (stack) of identical dims with channel values in [0, 255],
    deterministically."""

    name = "abstract"
    reentrant = False

    def predict_embedding(self, rgb_stack: np.ndarray):
        """Image-style embedding, or None when the backend has no predictor."""
        return None

    def stylize_slice(self, rgb_slice: np.ndarray, embedding: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def stylize_stack(self, rgb_stack: np.ndarray, embedding: np.ndarray) -> np.ndarray:
        out = np.empty_like(rgb_stack)
        for k in range(rgb_stack.shape[0]):
            try:
                out[k] = self.stylize_slice(rgb_stack[k], embedding)
            except BackendError:
                raise
            except Exception as exc:
                raise BackendError(f"backend {self.name!r} failed on slice {k}: {exc}") from exc
        return out


class IdentityStyleBackend(StyleBackend):
    """Returns its input unchanged; useful for pipeline plumbing tests."""

    name = "identity"
    reentrant = True

    def stylize_slice(self, rgb_slice, embedding):
        return np.array(rgb_slice, dtype=np.float64)


class MockStyleBackend(StyleBackend):
    """Deterministic embedding-driven intensity perturbation.

    Per pixel and channel c: out = clamp(v + sum_k e_k * w_ck(v), 0, 255)
    with the fixed smooth basis

        w_ck(v) = g_k * sin(a_k * v + phi_ck),
        g_k = 8 / (1 + k),  a_k = pi * (1 + k mod 4) / 255,
        phi_ck = 2*pi * ((3c + 5k) mod 16) / 16.

    Identity at e = 0 and continuous in e (linear). The basis has only four
    distinct frequencies, so the sum collapses to
    sum_f A_cf*sin(a_f*v) + B_cf*cos(a_f*v) with embedding-dependent
    coefficients; evaluation uses that form.
    """

    name = "mock"
    reentrant = True

    def __init__(self):
        k = np.arange(EMBEDDING_DIM)
        self._gain = 8.0 / (1.0 + k.astype(np.float64))
        self._freq_index = k % 4
        self._freqs = math.pi * (1.0 + np.arange(4, dtype=np.float64)) / 255.0
        c = np.arange(3)[:, None]
        self._phase = 2.0 * math.pi * ((3 * c + 5 * k[None, :]) % 16) / 16.0

    def _coefficients(self, embedding):
        """(A, B) of shape (3, 4): grouped sin/cos weights per channel/freq."""
        weights = np.asarray(embedding, dtype=np.float64) * self._gain
        a = np.zeros((3, 4))
        b = np.zeros((3, 4))
        for c in range(3):
            cos_phi = weights * np.cos(self._phase[c])
            sin_phi = weights * np.sin(self._phase[c])
            for f in range(4):
                sel = self._freq_index == f
                a[c, f] = cos_phi[sel].sum()
                b[c, f] = sin_phi[sel].sum()
        return a, b

    def stylize_slice(self, rgb_slice, embedding):
        a, b = self._coefficients(embedding)
        out = np.empty_like(rgb_slice, dtype=np.float64)
        for c in range(3):
            v = rgb_slice[:, :, c]
            arg = np.multiply.outer(v, self._freqs)
            delta = np.sin(arg) @ a[c] + np.cos(arg) @ b[c]
            out[:, :, c] = np.clip(v + delta, 0.0, 255.0)
        return out


class ExternalProcessBackend(StyleBackend):
    """Invokes an external command per volume via a request directory.

    The directory holds ``input.vaug`` (three consecutive native records:
    the R, G and B channel volumes) and ``embedding.json`` (100 numbers);
    the command is run with the directory path as its single argument and
    must write ``output.vaug`` with identical dims. Nonzero exit status is
    a backend failure.
    """

    name = "external"
    reentrant = True  # unique request directory per invocation

    def __init__(self, command, workdir=None):
        if not command:
            raise ValueError("external backend needs a non-empty command")
        self.command = [str(c) for c in command]
        self.workdir = workdir

    def stylize_slice(self, rgb_slice, embedding):
        stack = self.stylize_stack(rgb_slice[None], embedding)
        return stack[0]

    def stylize_stack(self, rgb_stack, embedding):
        req_dir = tempfile.mkdtemp(prefix="volaug-style-", dir=self.workdir)
        try:
            channels = [
                Volume(np.ascontiguousarray(rgb_stack[:, :, :, c]), (1.0, 1.0, 1.0))
                for c in range(3)
            ]
            write_native_multi(channels, os.path.join(req_dir, "input.vaug"))
            with open(os.path.join(req_dir, "embedding.json"), "w", encoding="utf-8") as f:
                json.dump([float(v) for v in embedding], f)
            proc = subprocess.run(self.command + [req_dir], capture_output=True, text=True)
            if proc.returncode != 0:
                raise BackendError(
                    f"external backend exited with status {proc.returncode}: "
                    f"{proc.stderr.strip()[:500]}")
            out_path = os.path.join(req_dir, "output.vaug")
            if not os.path.exists(out_path):
                raise BackendProtocolError("external backend wrote no output.vaug")
            records = read_native_multi(out_path)
            if len(records) != 3:
                raise BackendProtocolError(
                    f"expected 3 channel records in output.vaug, got {len(records)}")
            out = np.stack([r.data for r in records], axis=-1)
            if out.shape != rgb_stack.shape:
                raise BackendProtocolError(
                    f"backend changed dims: {out.shape} != {rgb_stack.shape}")
            return out
        finally:
            shutil.rmtree(req_dir, ignore_errors=True)


def make_backend(spec: dict) -> StyleBackend:
    """Instantiate a backend from its config dict ({'name': ..., ...})."""
    name = spec.get("name")
    if name == "mock":
        return MockStyleBackend()
    if name == "identity":
        return IdentityStyleBackend()
    if name == "external":
        return ExternalProcessBackend(spec.get("command", ()), spec.get("workdir"))
    raise ValueError(f"unknown style backend {name!r}")


def stylize_volume(vol: Volume, cfg: StyleConfig, rng: np.random.Generator,
                   backend: StyleBackend) -> Volume:
    """Stylize a whole volume with a single volume-constant embedding.

    normalize to 0-255 -> per-slice gray->RGB along z -> draw one random
    embedding -> mix with the backend-predicted image embedding (zeros when
    the backend has no predictor) -> stylize every slice with that one
    embedding -> RGB->gray -> restack. Dims and spacing are unchanged.
    """
    norm = normalize_u8(vol)
    nz = norm.data.shape[0]
    stack = np.stack([gray_to_rgb(norm.data[k]) for k in range(nz)])
    s_random = sample_style_embedding(rng)
    s_image = backend.predict_embedding(stack)
    if s_image is None:
        s_image = np.zeros(EMBEDDING_DIM)
    mixed = mix_embeddings(cfg.alpha, s_random, s_image, cfg.literal_eq1)
    out_stack = np.asarray(backend.stylize_stack(stack, mixed), dtype=np.float64)
    if out_stack.shape != stack.shape:
        raise BackendProtocolError(
            f"backend changed dims: {out_stack.shape} != {stack.shape}")
    if not np.isfinite(out_stack).all():
        raise BackendProtocolError("backend produced non-finite values")
    if out_stack.min() < 0.0 or out_stack.max() > 255.0:
        raise BackendProtocolError("backend produced values outside [0, 255]")
    gray = np.stack([rgb_to_gray(out_stack[k]) for k in range(nz)])
    return Volume(gray, vol.spacing, vol.axis_order)
