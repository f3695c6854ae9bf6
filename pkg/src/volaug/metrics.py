"""Segmentation evaluation: Dice overlap, STAPLE consensus and
inter-observer reporting.

STAPLE here is the binary EM estimator: a latent true segmentation is
inferred together with per-rater sensitivity p_j and specificity q_j. The
foreground prior is spatially uniform (the mean rater foreground fraction),
chosen for determinism.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import Mask

_PQ_CLAMP = (1e-6, 1.0 - 1e-6)


def dsc(a: Mask, b: Mask) -> float:
    """Dice similarity coefficient 2|A&B| / (|A|+|B|); two empty masks -> 1.0."""
    if a.data.shape != b.data.shape:
        raise ValueError(f"mask dims differ: {a.dims} vs {b.dims}")
    na = int(a.data.sum())
    nb = int(b.data.sum())
    if na + nb == 0:
        return 1.0
    inter = int((a.data & b.data).sum())
    return 2.0 * inter / (na + nb)


@dataclass
class StapleResult:
    consensus: Mask
    posterior: np.ndarray            # per-voxel foreground probability
    sensitivities: np.ndarray        # p_j per rater
    specificities: np.ndarray        # q_j per rater
    iterations: int
    converged: bool
    log_likelihoods: list            # one entry per EM iteration


def staple(masks, init_pq: float = 0.99, tol: float = 1e-6,
           max_iter: int = 100) -> StapleResult:
    """EM consensus over >= 2 rater masks of equal dims.

    E-step: posterior w_i proportional to
        gamma * prod_j p_j^{d_ij} (1-p_j)^{1-d_ij}   vs
        (1-gamma) * prod_j q_j^{1-d_ij} (1-q_j)^{d_ij}.
    M-step: p_j = sum w_i d_ij / sum w_i,
            q_j = sum (1-w_i)(1-d_ij) / sum (1-w_i).
    Iterates until the largest parameter change drops below ``tol`` or
    ``max_iter`` is reached; p and q are clamped to [1e-6, 1-1e-6].
    """
    masks = list(masks)
    if len(masks) < 2:
        raise ValueError("STAPLE needs at least 2 raters")
    shape = masks[0].data.shape
    for m in masks[1:]:
        if m.data.shape != shape:
            raise ValueError("rater mask dims differ")
    ref = masks[0]
    d = np.stack([m.data.ravel() for m in masks]).astype(bool)  # (J, N)
    n_raters, n_vox = d.shape
    gamma = float(d.mean())

    lo, hi = _PQ_CLAMP
    p = np.full(n_raters, float(init_pq))
    q = np.full(n_raters, float(init_pq))

    if gamma == 0.0 or gamma == 1.0:
        # unanimous background/foreground: consensus is immediate
        w = np.full(n_vox, gamma)
        consensus = ref.with_data((w >= 0.5).reshape(shape).astype(np.uint8))
        return StapleResult(consensus, w.reshape(shape), p, q,
                            iterations=0, converged=True, log_likelihoods=[])

    log_likelihoods = []
    converged = False
    iterations = 0
    w = np.full(n_vox, gamma)
    for iterations in range(1, int(max_iter) + 1):
        a = gamma * np.prod(np.where(d, p[:, None], 1.0 - p[:, None]), axis=0)
        b = (1.0 - gamma) * np.prod(np.where(d, 1.0 - q[:, None], q[:, None]), axis=0)
        total = a + b
        w = a / total
        log_likelihoods.append(float(np.log(total).sum()))

        w_sum = w.sum()
        cw_sum = n_vox - w_sum
        p_new = np.clip((w[None, :] * d).sum(axis=1) / max(w_sum, 1e-300), lo, hi)
        q_new = np.clip(((1.0 - w)[None, :] * (~d)).sum(axis=1) / max(cw_sum, 1e-300),
                        lo, hi)
        delta = max(np.abs(p_new - p).max(), np.abs(q_new - q).max())
        p, q = p_new, q_new
        if delta < tol:
            converged = True
            break

    consensus = ref.with_data((w >= 0.5).reshape(shape).astype(np.uint8))
    return StapleResult(consensus, w.reshape(shape), p, q,
                        iterations=iterations, converged=converged,
                        log_likelihoods=log_likelihoods)


def interobserver_report(masks_by_observer_by_scan: dict) -> dict:
    """Mean DSC of each observer against the other observers, per scan.

    Input: {scan_id: {observer: Mask}} with >= 2 observers per scan.
    Output: {observer: {scan_id: mean DSC vs others}}.
    """
    report: dict = {}
    for scan_id, by_obs in masks_by_observer_by_scan.items():
        if len(by_obs) < 2:
            raise ValueError(f"scan {scan_id!r} needs >= 2 observers")
        for obs, mask in by_obs.items():
            others = [dsc(mask, other) for name, other in by_obs.items()
                      if name != obs]
            report.setdefault(obs, {})[scan_id] = float(np.mean(others))
    return report
