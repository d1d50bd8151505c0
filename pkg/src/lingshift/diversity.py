"""Herfindahl-Hirschman concentration of language distributions.

HHI is the sum of squared language shares, reported on the [0, 1] scale:
1 for a single-language landscape, 1/k for k equally used languages.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path

from .aggregation import CountTable, LanguageDistribution, distribution
from .errors import EmptyCell, EmptyDistribution, NoData


@dataclass(frozen=True)
class HhiValue:
    value: float
    support_count: int


def _hhi_exact(shares: list[float]) -> float:
    # floats are dyadic rationals: scale to a common denominator, then one rounding
    ratios = [s.as_integer_ratio() for s in shares]
    den = max(d for _, d in ratios)
    ints = [n * (den // d) for n, d in ratios]
    total = sum(ints)
    return sum(i * i for i in ints) / (total * total)


def hhi_of_shares(shares: Iterable[float]) -> float:
    """Sum of squared shares, normalised by the squared share total.

    The float result is a few ulps from the exact value; within 1e-12 of
    either bound (1/k or 1) the exact rational route decides, so uniform
    inputs give exactly 1/k and no input crosses a bound.
    """
    xs = [float(s) for s in shares if s]
    if not xs:
        raise EmptyDistribution("distribution has no languages")
    if any(s < 0 or not math.isfinite(s) for s in xs):
        raise ValueError("shares must be finite and non-negative")
    total = math.fsum(xs)
    value = math.fsum(s * s for s in xs) / (total * total)
    if (1.0 + 1e-12) / len(xs) < value < 1.0 - 1e-12:
        return value
    return _hhi_exact(xs)


def hhi(dist: LanguageDistribution) -> HhiValue:
    return HhiValue(hhi_of_shares(dist.shares.values()), dist.support_count)


@dataclass
class HhiSeries:
    country: str
    points: dict[str, HhiValue] = field(default_factory=dict)
    thin: frozenset[str] = frozenset()

    def months(self, include_thin: bool = False) -> list[str]:
        return sorted(m for m in self.points if include_thin or m not in self.thin)

    def values(self, months: Iterable[str] | None = None, include_thin: bool = False) -> list[float]:
        """HHI values in month order, restricted to ``months`` when given."""
        wanted = set(self.points if months is None else months)
        return [self.points[m].value for m in self.months(include_thin) if m in wanted]


def hhi_series(table: CountTable, country: str, min_support: int = 0) -> HhiSeries:
    """One point per non-empty month; months under ``min_support`` are flagged thin."""
    months = table.months(country)
    if not months:
        raise NoData(f"no data for {country}")
    points = {m: hhi(distribution(table, country, [m])) for m in months}
    thin = frozenset(m for m, p in points.items() if p.support_count < min_support)
    return HhiSeries(country, points, thin)


def hhi_baseline(table: CountTable, country: str, period: Iterable[str]) -> HhiValue:
    """HHI of the distribution pooled over ``period`` (counts first, then shares)."""
    period = list(period)
    if not period:
        raise NoData("empty period")
    try:
        return hhi(distribution(table, country, period))
    except EmptyCell as exc:
        raise NoData(str(exc)) from None


def hhi_monthly_mean(series: HhiSeries, months: Iterable[str] | None = None) -> float:
    """Mean of monthly HHI values; the per-month reading of an averaged HHI."""
    values = series.values(months)
    if not values:
        raise NoData(f"no usable months for {series.country}")
    return math.fsum(values) / len(values)


def write_series_csv(series: Iterable[HhiSeries], path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["country", "month", "hhi", "support"])
        for s in sorted(series, key=lambda s: s.country):
            for month in s.months(include_thin=True):
                p = s.points[month]
                w.writerow([s.country, month, f"{p.value:.10g}", p.support_count])


def write_choropleth_csv(values: Mapping[str, object], path: str | Path, column: str = "value") -> None:
    """One ``country,<column>`` row per country, sorted by country code."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["country", column])
        for country in sorted(values):
            v = values[country]
            w.writerow([country, f"{v:.10g}" if isinstance(v, float) else v])
