"""Dependency-free statistics: t tail probabilities, two-sample t-tests,
Pearson correlation and p-value banding.

The two-sided t tail is evaluated through the regularized incomplete beta
function, computed by its continued fraction (modified Lentz iteration).
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum

from .errors import DegenerateInput

CF_TOL = 1e-12
CF_MAX_ITER = 20_000
# past this df the continued fraction converges too slowly near its switch
# point; the 1/df-corrected Gaussian tail has O(1/df^2) error there
LARGE_DF = 1e7
_TINY = 1e-300


class Significance(str, Enum):
    HIGHLY = "highly_significant"
    VERY = "very_significant"
    SIGNIFICANT = "significant"
    NOT = "not_significant"


def classify(p: float) -> Significance:
    """Band a p-value: <0.001, <0.01, <0.05 (strict), else not significant."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p-value out of [0, 1]: {p}")
    if p < 0.001:
        return Significance.HIGHLY
    if p < 0.01:
        return Significance.VERY
    if p < 0.05:
        return Significance.SIGNIFICANT
    return Significance.NOT


def _beta_cf(a: float, b: float, x: float) -> float:
    # Continued fraction for I_x(a, b) * a * B(a,b) / (x^a (1-x)^b).
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < CF_TOL:
            return h
    raise ArithmeticError(f"incomplete beta did not converge (a={a}, b={b}, x={x})")


def _stirling_tail(z: float) -> float:
    # lgamma(z) minus its leading Stirling terms; accurate for z >= 50
    z2 = z * z
    return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * z2)) / z2) / z2) / z


def log_beta(a: float, b: float) -> float:
    """log B(a, b), stable when one argument is large."""
    if a < b:
        a, b = b, a
    if a < 50.0:
        return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    # lgamma(a) - lgamma(a + b) without cancelling two huge values
    diff = (-(a - 0.5) * math.log1p(b / a) - b * math.log(a + b) + b
            + _stirling_tail(a) - _stirling_tail(a + b))
    return math.lgamma(b) + diff


def _log_unit(x: float, y: float) -> float:
    # log(x) where y = 1 - x is known more precisely than x near 1
    return math.log1p(-y) if x > 0.5 else math.log(x)


def betainc(a: float, b: float, x: float, y: float | None = None) -> float:
    """Regularized incomplete beta I_x(a, b); ``y`` may pass 1 - x exactly."""
    if a <= 0 or b <= 0:
        raise ValueError("betainc needs a, b > 0")
    if y is None:
        y = 1.0 - x
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    log_front = a * _log_unit(x, y) + b * _log_unit(y, x) - log_beta(a, b)
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, y) / b


def t_sf(t: float, df: float) -> float:
    """Two-sided tail probability P(|T| >= |t|) for Student's t with ``df``."""
    if not df > 0:
        raise ValueError(f"degrees of freedom must be positive, got {df}")
    if math.isnan(t):
        raise ValueError("t is NaN")
    t = abs(t)
    if t == 0.0:
        return 1.0
    if math.isinf(t):
        return 0.0
    if math.isinf(df):
        return math.erfc(t / math.sqrt(2.0))
    t2 = t * t
    if df > LARGE_DF:
        density = math.exp(-0.5 * t2) / math.sqrt(2.0 * math.pi)
        return math.erfc(t / math.sqrt(2.0)) + density * (t2 * t + t) / (2.0 * df)
    denom = df + t2
    p = betainc(df / 2.0, 0.5, df / denom, t2 / denom)
    return min(1.0, max(0.0, p))


@dataclass(frozen=True)
class TestResult:
    __test__ = False  # keep pytest from collecting this as a test class

    t_statistic: float
    degrees_of_freedom: float
    p_value: float
    significance_class: Significance
    mean_a: float = math.nan
    mean_b: float = math.nan
    degenerate: bool = False

    @property
    def significant(self) -> bool:
        return self.p_value < 0.05


def mean_var(xs: Sequence[float]) -> tuple[float, float]:
    """Sample mean and unbiased variance (two-pass)."""
    n = len(xs)
    lo, hi = min(xs), max(xs)
    if lo == hi:
        return float(lo), 0.0
    m = math.fsum(xs) / n
    return m, math.fsum((x - m) ** 2 for x in xs) / (n - 1)


def welch_t_test(a: Sequence[float], b: Sequence[float], equal_var: bool = False) -> TestResult:
    """Two-sided two-sample t-test; Welch-Satterthwaite df unless ``equal_var``.

    With both samples constant the test is degenerate: equal means give
    p = 1 and t = 0, unequal means give p = 0 and an infinite t. Both cases
    carry ``degenerate=True``.
    """
    na, nb = len(a), len(b)
    if na < 2 or nb < 2:
        raise DegenerateInput(f"need at least 2 values per sample, got {na} and {nb}")
    ma, va = mean_var(a)
    mb, vb = mean_var(b)
    if not all(math.isfinite(v) for v in (ma, mb, va, vb)):
        raise DegenerateInput("non-finite sample values")
    diff = ma - mb
    if equal_var:
        df = float(na + nb - 2)
        pooled = ((na - 1) * va + (nb - 1) * vb) / df
        se2 = pooled * (1.0 / na + 1.0 / nb)
    else:
        qa, qb = va / na, vb / nb
        se2 = qa + qb
        # the df ratio is scale-free; normalising keeps tiny variances from underflowing
        scale = max(qa, qb)
        if scale > 0.0:
            ra, rb = qa / scale, qb / scale
            df = (ra + rb) ** 2 / (ra * ra / (na - 1) + rb * rb / (nb - 1))
    if se2 == 0.0:
        # both samples constant (or spread below the float range)
        df = float(na + nb - 2)
        if diff == 0.0:
            return TestResult(0.0, df, 1.0, Significance.NOT, ma, mb, degenerate=True)
        t = math.copysign(math.inf, diff)
        return TestResult(t, df, 0.0, Significance.HIGHLY, ma, mb, degenerate=True)
    t = diff / math.sqrt(se2)
    p = t_sf(t, df)
    return TestResult(t, df, p, classify(p), ma, mb)


def student_t_test(a: Sequence[float], b: Sequence[float]) -> TestResult:
    return welch_t_test(a, b, equal_var=True)


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    n: int
    excluded: list[str] = field(default_factory=list)


def pearson(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    n = len(x)
    if n != len(y):
        raise DegenerateInput(f"length mismatch: {n} vs {len(y)}")
    if n < 3:
        raise DegenerateInput(f"need at least 3 points, got {n}")
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    dx = [v - mx for v in x]
    dy = [v - my for v in y]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    if sxx == 0.0 or syy == 0.0 or min(x) == max(x) or min(y) == max(y):
        raise DegenerateInput("zero variance")
    sxy = math.fsum(p * q for p, q in zip(dx, dy))
    r = sxy / math.sqrt(sxx * syy)
    return CorrelationResult(max(-1.0, min(1.0, r)), n)


def benjamini_hochberg(pvalues: Sequence[float]) -> list[float]:
    """BH-adjusted p-values, returned in input order."""
    m = len(pvalues)
    order = sorted(range(m), key=lambda i: pvalues[i])
    adjusted = [0.0] * m
    running = 1.0
    for rank in range(m, 0, -1):
        i = order[rank - 1]
        running = min(running, pvalues[i] * m / rank)
        adjusted[i] = running
    return adjusted
