"""Multi-run summaries and the two significance tests used by the harness:
the rank-based Friedman test and Welch's unequal-variance t-test.

The chi-square and Student-t tail areas are computed from the regularized
incomplete gamma and beta functions (series plus continued fractions, to
roughly 1e-14 relative accuracy), so the package needs no statistics
dependency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "RunSummary",
    "TestResult",
    "summarize",
    "friedman_test",
    "welch_t_test",
    "chi_square_sf",
    "student_t_two_sided",
    "regularized_lower_gamma",
    "regularized_upper_gamma",
    "regularized_incomplete_beta",
]

_EPS = 1e-15
_MAX_ITER = 500


@dataclass(frozen=True)
class RunSummary:
    """Best / average / sample standard deviation of a batch of final costs."""

    best: float
    average: float
    std: float
    n_runs: int


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    df: float


def summarize(costs: Sequence[float]) -> RunSummary:
    """best = min, average = mean, std = n-1 sample deviation (0 for n = 1)."""
    values = np.asarray(list(costs), dtype=float)
    if values.size == 0:
        raise ValueError("summarize needs at least one cost")
    std = float(values.std(ddof=1)) if values.size > 1 else 0.0
    return RunSummary(
        best=float(values.min()),
        average=float(values.mean()),
        std=std,
        n_runs=int(values.size),
    )


# --- special functions ---


def regularized_lower_gamma(a: float, x: float) -> float:
    """P(a, x), via the series for x < a + 1 and the continued fraction above."""
    if a <= 0:
        raise ValueError("a must be > 0")
    if x < 0:
        raise ValueError("x must be >= 0")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return 1.0 - _gamma_cf(a, x)


def regularized_upper_gamma(a: float, x: float) -> float:
    """Q(a, x) = 1 - P(a, x), computed on the side that avoids cancellation."""
    if a <= 0:
        raise ValueError("a must be > 0")
    if x < 0:
        raise ValueError("x must be >= 0")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_cf(a, x)


def _gamma_series(a: float, x: float) -> float:
    term = 1.0 / a
    total = term
    denom = a
    for _ in range(_MAX_ITER):
        denom += 1.0
        term *= x / denom
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cf(a: float, x: float) -> float:
    # modified Lentz evaluation of the upper-tail continued fraction
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b if b != 0 else 1.0 / tiny
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), continued fraction on whichever side converges fast."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be > 0")
    if not (0.0 <= x <= 1.0):
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def _beta_cf(a: float, b: float, x: float) -> float:
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


def chi_square_sf(x: float, df: float) -> float:
    """P(X >= x) for a chi-square variable with df degrees of freedom."""
    if df <= 0:
        raise ValueError("df must be > 0")
    if x <= 0:
        return 1.0
    return regularized_upper_gamma(df / 2.0, x / 2.0)


def student_t_two_sided(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with df degrees of freedom."""
    if df <= 0:
        raise ValueError("df must be > 0")
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    return regularized_incomplete_beta(df / 2.0, 0.5, x)


# --- tests ---


def _block_ranks(row: np.ndarray) -> np.ndarray:
    """Ranks 1..t within one block, tied values sharing their average rank."""
    order = np.argsort(row, kind="stable")
    ranks = np.empty(row.size, dtype=float)
    i = 0
    while i < row.size:
        j = i
        while j + 1 < row.size and row[order[j + 1]] == row[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def friedman_test(scores: np.ndarray) -> TestResult:
    """Friedman chi-square over a (blocks, treatments) score matrix.

    Treatments are ranked within each block (average ranks on ties) and the
    statistic is 12 b / (t (t + 1)) * sum_j (mean_rank_j - (t + 1) / 2)^2,
    referred to a chi-square with t - 1 degrees of freedom.
    """
    scores = np.asarray(scores, dtype=float)
    if scores.ndim != 2:
        raise ValueError("scores must be a (blocks, treatments) matrix")
    b, t = scores.shape
    if b < 2 or t < 2:
        raise ValueError("need at least 2 blocks and 2 treatments")
    ranks = np.vstack([_block_ranks(row) for row in scores])
    mean_ranks = ranks.mean(axis=0)
    statistic = 12.0 * b / (t * (t + 1.0)) * np.sum(
        (mean_ranks - (t + 1.0) / 2.0) ** 2
    )
    df = float(t - 1)
    return TestResult(
        statistic=float(statistic),
        p_value=chi_square_sf(float(statistic), df),
        df=df,
    )


def welch_t_test(a: Sequence[float], b: Sequence[float]) -> TestResult:
    """Two-sided Welch t-test (unequal variances, Welch-Satterthwaite df)."""
    xa = np.asarray(list(a), dtype=float)
    xb = np.asarray(list(b), dtype=float)
    if xa.size < 2 or xb.size < 2:
        raise ValueError("each sample needs at least 2 observations")
    va = float(xa.var(ddof=1))
    vb = float(xb.var(ddof=1))
    if va == 0.0 and vb == 0.0:
        raise ValueError("at least one sample must have nonzero variance")
    sa = va / xa.size
    sb = vb / xb.size
    statistic = (float(xa.mean()) - float(xb.mean())) / math.sqrt(sa + sb)
    df = (sa + sb) ** 2 / (
        sa**2 / (xa.size - 1) + sb**2 / (xb.size - 1)
    )
    return TestResult(
        statistic=statistic,
        p_value=student_t_two_sided(statistic, df),
        df=float(df),
    )
