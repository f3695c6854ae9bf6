"""Nonparametric comparison of augmentation methods over common scans:
Friedman omnibus test plus Dunn's pairwise post-hoc with Bonferroni
correction.

Scores are ranked within each block (scan); ties receive average ranks and
the Friedman statistic carries the standard tie correction (toggleable).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import math

import numpy as np

from .special import chi2_sf, normal_sf


@dataclass
class ScoreMatrix:
    """n blocks (scans) x k treatments (methods) of real scores."""

    scores: np.ndarray
    labels: list

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.ndim != 2:
            raise ValueError("scores must be a 2D matrix")
        n, k = scores.shape
        if n < 2 or k < 2:
            raise ValueError(f"need >= 2 blocks and >= 2 treatments, got {n}x{k}")
        if not np.isfinite(scores).all():
            raise ValueError("scores must be finite")
        self.labels = [str(l) for l in self.labels]
        if len(self.labels) != k:
            raise ValueError("one label per treatment required")
        self.scores = scores


def _average_ranks(row: np.ndarray) -> np.ndarray:
    """Ranks 1..k with ties averaged."""
    k = row.size
    order = np.argsort(row, kind="stable")
    ranks = np.empty(k, dtype=np.float64)
    i = 0
    while i < k:
        j = i
        while j + 1 < k and row[order[j + 1]] == row[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for t in range(i, j + 1):
            ranks[order[t]] = avg
        i = j + 1
    return ranks


def _block_ranks(scores: np.ndarray) -> np.ndarray:
    return np.stack([_average_ranks(row) for row in scores])


def friedman(m: ScoreMatrix, tie_correction: bool = True):
    """Friedman chi-square, degrees of freedom and upper-tail p-value.

    chi2 = 12/(n k (k+1)) * sum_j R_j^2 - 3 n (k+1), divided when ties exist
    by 1 - sum(t^3 - t) / (n k (k^2 - 1)). Fully tied data degenerates to
    chi2 = 0, p = 1.
    """
    scores = m.scores
    n, k = scores.shape
    ranks = _block_ranks(scores)
    rank_sums = ranks.sum(axis=0)
    chi2 = 12.0 / (n * k * (k + 1)) * float((rank_sums ** 2).sum()) - 3.0 * n * (k + 1)

    if tie_correction:
        tie_term = 0.0
        for row in scores:
            _, counts = np.unique(row, return_counts=True)
            tie_term += float((counts.astype(np.float64) ** 3 - counts).sum())
        corr = 1.0 - tie_term / (n * k * (k * k - 1.0))
        if corr <= 0.0:
            return 0.0, k - 1, 1.0
        chi2 /= corr
    chi2 = max(chi2, 0.0)
    return chi2, k - 1, chi2_sf(chi2, k - 1)


def dunn_bonferroni(m: ScoreMatrix) -> np.ndarray:
    """k x k matrix of Bonferroni-adjusted two-sided p-values.

    z_ij = (Rbar_i - Rbar_j) / sqrt(k(k+1)/(6n)); each raw p is multiplied
    by the number of pairs k(k-1)/2 and clamped to 1. Symmetric with a unit
    diagonal.
    """
    scores = m.scores
    n, k = scores.shape
    mean_ranks = _block_ranks(scores).mean(axis=0)
    se = math.sqrt(k * (k + 1) / (6.0 * n))
    n_pairs = k * (k - 1) / 2.0
    out = np.ones((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            z = (mean_ranks[i] - mean_ranks[j]) / se
            p = min(1.0, 2.0 * normal_sf(abs(z)) * n_pairs)
            out[i, j] = out[j, i] = p
    return out


@dataclass
class ComparisonReport:
    labels: list
    friedman_chi2: float
    df: int
    p_value: float
    alpha: float
    pairwise_p: Optional[np.ndarray]      # None when the omnibus test fails
    significant: Optional[np.ndarray]     # adjusted p < alpha

    def to_dict(self) -> dict:
        out = {
            "labels": self.labels,
            "friedman": {"chi2": self.friedman_chi2, "df": self.df,
                         "p": self.p_value},
            "alpha": self.alpha,
        }
        if self.pairwise_p is not None:
            out["pairwise_p"] = [[float(v) for v in row] for row in self.pairwise_p]
            out["significant"] = [[bool(v) for v in row] for row in self.significant]
        return out


def compare_methods(m: ScoreMatrix, alpha: float = 0.05) -> ComparisonReport:
    """Omnibus Friedman test; pairwise Dunn-Bonferroni only when it rejects."""
    chi2, df, p = friedman(m)
    pairwise = None
    significant = None
    if p < alpha:
        pairwise = dunn_bonferroni(m)
        significant = pairwise < alpha
        np.fill_diagonal(significant, False)
    return ComparisonReport(labels=list(m.labels), friedman_chi2=chi2, df=df,
                            p_value=p, alpha=alpha, pairwise_p=pairwise,
                            significant=significant)
