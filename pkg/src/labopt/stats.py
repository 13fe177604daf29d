"""Wilcoxon signed-rank and Friedman tests for comparing optimizers."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc
from scipy.stats import chi2, rankdata

__all__ = [
    "SignedRankResult",
    "FriedmanResult",
    "wilcoxon_signed_rank",
    "signed_rank_null_distribution",
    "friedman",
]

EXACT_MAX_N = 25


@dataclass(frozen=True)
class SignedRankResult:
    t_plus: float
    t_minus: float
    n_effective: int
    p_value: float
    method: str  # "exact", "normal_approx" or "degenerate"

    def winner(self, alpha=0.05):
        """``"+"`` if the first sample is significantly larger, ``"-"`` if smaller, else ``"="``."""
        if self.p_value >= alpha or self.t_plus == self.t_minus:
            return "="
        return "+" if self.t_plus > self.t_minus else "-"


@dataclass(frozen=True)
class FriedmanResult:
    mean_ranks: np.ndarray
    ordering: np.ndarray  # 1 = best (lowest mean rank)
    statistic: float
    p_value: float


def signed_rank_null_distribution(n):
    """Counts of each rank sum ``T+ = 0..n(n+1)/2`` over all ``2**n`` sign patterns."""
    top = n * (n + 1) // 2
    counts = np.zeros(top + 1, dtype=np.float64)
    counts[0] = 1.0
    for r in range(1, n + 1):
        counts[r:] = counts[r:] + counts[:-r].copy()
    return counts


def wilcoxon_signed_rank(a, b):
    """Two-sided Wilcoxon signed-rank test on paired samples ``a`` and ``b``.

    Zero differences are dropped.  Without ties and with at most 25
    non-zero differences the p-value comes from the exact null
    distribution; otherwise from the normal approximation with the tie
    correction and no continuity correction.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size != b.size:
        raise ValueError(f"samples differ in length ({a.size} vs {b.size})")
    if a.size == 0:
        raise ValueError("samples are empty")
    d = a - b
    d = d[d != 0]
    n = d.size
    if n == 0:
        return SignedRankResult(0.0, 0.0, 0, 1.0, "degenerate")
    ranks = rankdata(np.abs(d))
    t_plus = float(ranks[d > 0].sum())
    t_minus = float(ranks[d < 0].sum())
    _, tie_counts = np.unique(np.abs(d), return_counts=True)
    has_ties = bool(np.any(tie_counts > 1))

    if n <= EXACT_MAX_N and not has_ties:
        counts = signed_rank_null_distribution(n)
        total = 2.0**n
        t = int(round(t_plus))
        lower = counts[: t + 1].sum() / total
        upper = counts[t:].sum() / total
        return SignedRankResult(t_plus, t_minus, n, float(min(1.0, 2.0 * min(lower, upper))), "exact")

    mu = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0 - np.sum(tie_counts**3 - tie_counts) / 48.0
    if var <= 0:
        return SignedRankResult(t_plus, t_minus, n, 1.0, "normal_approx")
    z = (t_plus - mu) / math.sqrt(var)
    p = float(erfc(abs(z) / math.sqrt(2.0)))
    return SignedRankResult(t_plus, t_minus, n, min(1.0, p), "normal_approx")


def friedman(results):
    """Friedman ranks of algorithms (columns) over problems (rows).

    Lower values are better and receive lower ranks; ties get average
    ranks.  Returns mean ranks, the ordering (1 = best) and the
    chi-square statistic with its p-value (``k - 1`` degrees of freedom).
    """
    R = np.asarray(results, dtype=float)
    if R.ndim != 2 or R.shape[0] < 1 or R.shape[1] < 2:
        raise ValueError("need a matrix with at least one problem and two algorithms")
    n, k = R.shape
    ranks = rankdata(R, axis=1)
    mean_ranks = ranks.mean(axis=0)
    ordering = rankdata(mean_ranks, method="min").astype(int)
    stat = 12.0 * n / (k * (k + 1)) * float(np.sum((mean_ranks - (k + 1) / 2.0) ** 2))
    return FriedmanResult(mean_ranks, ordering, stat, float(chi2.sf(stat, k - 1)))
