"""Nonparametric statistics for the experiment harness.

The Mann-Whitney U test uses midrank ties, exact enumeration for small
samples, and a tie-corrected, continuity-corrected normal approximation for
large ones. Box summaries use the Tukey-hinge (midrank) quartile
convention and the 1.5 IQR whisker rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, groupby
from typing import Sequence

import scipy.stats

# exact enumeration below this pooled size, normal approximation at or above
EXACT_LIMIT = 20


def _midranks(values: Sequence[float]) -> list[float]:
    """Ranks 1..n with ties sharing the mean of their rank range."""
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def _u_statistic(pooled_ranks: Sequence[float], idx: Sequence[int], n1: int) -> float:
    return sum(pooled_ranks[i] for i in idx) - n1 * (n1 + 1) / 2.0


def mann_whitney_u(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Two-sided Wilcoxon-Mann-Whitney test.

    Returns (U, p) where U counts pairs in which an x observation exceeds a
    y observation (ties count one half). For pooled sizes below
    ``EXACT_LIMIT`` the p-value enumerates every assignment of the pooled
    values to the two groups; otherwise it uses the normal approximation
    with tie-corrected variance and a continuity correction.
    """
    if len(x) == 0 or len(y) == 0:
        raise ValueError("both samples must be non-empty")
    n1, n2 = len(x), len(y)
    pooled = list(x) + list(y)
    ranks = _midranks(pooled)
    u = _u_statistic(ranks, range(n1), n1)

    if n1 + n2 < EXACT_LIMIT:
        return u, _exact_p(pooled, ranks, n1, u)
    return u, _normal_p(pooled, ranks, n1, n2, u)


def _exact_p(pooled: list[float], ranks: list[float], n1: int, u: float) -> float:
    n = len(pooled)
    le = ge = total = 0
    for idx in combinations(range(n), n1):
        u_perm = _u_statistic(ranks, idx, n1)
        total += 1
        if u_perm <= u + 1e-9:
            le += 1
        if u_perm >= u - 1e-9:
            ge += 1
    return min(1.0, 2.0 * min(le, ge) / total)


def _normal_p(pooled: list[float], ranks: list[float], n1: int, n2: int, u: float) -> float:
    n = n1 + n2
    tie_term = 0.0
    for _, group in groupby(sorted(pooled)):
        t = sum(1 for _ in group)
        tie_term += t ** 3 - t
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if var <= 0.0:
        return 1.0  # every pooled value identical
    mean = n1 * n2 / 2.0
    diff = u - mean
    if diff > 0:
        diff -= 0.5
    elif diff < 0:
        diff += 0.5
    z = diff / math.sqrt(var)
    return min(1.0, math.erfc(abs(z) / math.sqrt(2.0)))


@dataclass(frozen=True)
class BoxSummary:
    """Plot-ready five-number summary with 1.5 IQR whiskers and outliers."""

    median: float
    q1: float
    q3: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[float, ...]


def _median(sorted_vals: Sequence[float]) -> float:
    n = len(sorted_vals)
    mid = n // 2
    if n % 2:
        return float(sorted_vals[mid])
    return (sorted_vals[mid - 1] + sorted_vals[mid]) / 2.0


def box_summary(values: Sequence[float]) -> BoxSummary:
    """Tukey-hinge quartiles: each hinge is the median of its half of the
    sorted data (middle value included in both halves for odd lengths)."""
    if not values:
        raise ValueError("cannot summarise an empty sample")
    s = sorted(values)
    n = len(s)
    half = (n + 1) // 2
    q1 = _median(s[:half])
    q3 = _median(s[-half:])
    med = _median(s)
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    inside = [v for v in s if lo_fence <= v <= hi_fence]
    outliers = tuple(v for v in s if v < lo_fence or v > hi_fence)
    return BoxSummary(
        median=med,
        q1=q1,
        q3=q3,
        whisker_low=min(inside),
        whisker_high=max(inside),
        outliers=outliers,
    )


def t_confidence_interval(values: Sequence[float], confidence: float = 0.95) -> tuple[float, float]:
    """Student-t interval for the mean; needs at least two observations."""
    n = len(values)
    if n < 2:
        raise ValueError("confidence interval needs at least 2 observations")
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    half = scipy.stats.t.ppf(0.5 + confidence / 2.0, n - 1) * math.sqrt(var / n)
    return (mean - half, mean + half)
