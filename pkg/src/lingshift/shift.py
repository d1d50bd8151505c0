"""Seasonally aligned treatment-vs-baseline comparison of monthly HHI.

Each test uses months as its sample unit: one HHI (or one language share)
per non-thin month in each window, compared with a two-sided t-test.
"""

from __future__ import annotations

import csv
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from .aggregation import CountTable, distribution, region_shares, volume_by
from .diversity import hhi_series
from .errors import ConfigError, InsufficientData, InsufficientMonths, LingshiftError
from .months import month_of_year, month_range, split_halves
from .stats import Significance, TestResult, benjamini_hochberg, classify, welch_t_test

DEFAULT_MIN_SUPPORT = 500


class Direction(str, Enum):
    MORE_CONCENTRATED = "more_concentrated"
    MORE_DIVERSE = "more_diverse"


@dataclass(frozen=True)
class WindowPair:
    treatment: tuple[str, ...] = tuple(month_range("2020-03", "2020-08"))
    baseline: tuple[str, ...] = tuple(month_range("2019-03", "2019-08"))

    def __post_init__(self):
        t, b = tuple(sorted(self.treatment)), tuple(sorted(self.baseline))
        object.__setattr__(self, "treatment", t)
        object.__setattr__(self, "baseline", b)
        if not t or not b:
            raise ConfigError("windows must be non-empty")
        if set(t) & set(b):
            raise ConfigError("treatment and baseline windows overlap")
        if len(t) != len(b):
            raise ConfigError("windows differ in length")
        if Counter(map(month_of_year, t)) != Counter(map(month_of_year, b)):
            raise ConfigError("windows are not aligned by calendar month")

    @classmethod
    def from_ranges(cls, treatment: tuple[str, str], baseline: tuple[str, str]) -> WindowPair:
        return cls(tuple(month_range(*treatment)), tuple(month_range(*baseline)))

    def swapped(self) -> WindowPair:
        return WindowPair(self.baseline, self.treatment)


def usable_months(table: CountTable, country: str, months: Iterable[str],
                   min_support: int) -> tuple[list[str], list[str]]:
    used, thin = [], []
    for m in months:
        n = table.count(country, m)
        if n == 0:
            continue
        (used if n >= min_support else thin).append(m)
    return used, thin


@dataclass(frozen=True)
class ShiftEntry:
    country: str
    result: TestResult
    direction: Direction
    hhi_baseline: float
    hhi_treatment: float
    treatment_months: tuple[str, ...]
    baseline_months: tuple[str, ...]
    thin_excluded: tuple[str, ...] = ()
    tie: bool = False
    p_adjusted: float | None = None

    @property
    def p_value(self) -> float:
        return self.result.p_value if self.p_adjusted is None else self.p_adjusted

    @property
    def significance_class(self) -> Significance:
        return classify(self.p_value)

    @property
    def significant(self) -> bool:
        return self.p_value < 0.05


def detect_shift(
    table: CountTable,
    country: str,
    windows: WindowPair | None = None,
    min_support: int = DEFAULT_MIN_SUPPORT,
    equal_var: bool = False,
) -> ShiftEntry:
    windows = windows or WindowPair()
    treat, thin_t = usable_months(table, country, windows.treatment, min_support)
    base, thin_b = usable_months(table, country, windows.baseline, min_support)
    if len(treat) < 2 or len(base) < 2:
        raise InsufficientData(
            f"{country}: {len(treat)} treatment / {len(base)} baseline usable months (need 2 each)"
        )
    series = hhi_series(table, country)
    a, b = series.values(treat), series.values(base)
    result = welch_t_test(a, b, equal_var)
    mean_t, mean_b = result.mean_a, result.mean_b
    tie = mean_t == mean_b
    direction = Direction.MORE_CONCENTRATED if mean_t > mean_b else Direction.MORE_DIVERSE
    return ShiftEntry(
        country, result, direction, mean_b, mean_t,
        tuple(treat), tuple(base), tuple(sorted(thin_t + thin_b)), tie,
    )


@dataclass
class ShiftReport:
    entries: dict[str, ShiftEntry] = field(default_factory=dict)
    failures: dict[str, str] = field(default_factory=dict)
    adjustment: str = "none"

    def significant(self) -> list[str]:
        return [c for c in sorted(self.entries) if self.entries[c].significant]

    def write_table(self, path: str | Path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["country", "p", "class", "direction", "hhi_baseline", "hhi_treatment"])
            for c in sorted(self.entries):
                e = self.entries[c]
                w.writerow([c, f"{e.p_value:.10g}", e.significance_class.value, e.direction.value,
                            f"{e.hhi_baseline:.10g}", f"{e.hhi_treatment:.10g}"])

    def write_choropleth(self, path: str | Path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["country", "class"])
            for c in sorted(self.entries):
                w.writerow([c, self.entries[c].significance_class.value])


def shift_report(
    table: CountTable,
    windows: WindowPair | None = None,
    countries: Iterable[str] | None = None,
    min_support: int = DEFAULT_MIN_SUPPORT,
    equal_var: bool = False,
    adjustment: str = "none",
) -> ShiftReport:
    """Run detect_shift for every country; per-country failures are recorded, not raised."""
    if adjustment not in ("none", "bh"):
        raise ConfigError(f"unknown multiple-comparison mode {adjustment!r}")
    windows = windows or WindowPair()
    report = ShiftReport(adjustment=adjustment)
    for country in sorted(countries if countries is not None else table.countries()):
        try:
            report.entries[country] = detect_shift(table, country, windows, min_support, equal_var)
        except LingshiftError as exc:
            report.failures[country] = f"{exc.code}: {exc}"
    if adjustment == "bh" and report.entries:
        names = sorted(report.entries)
        adjusted = benjamini_hochberg([report.entries[c].result.p_value for c in names])
        for c, p in zip(names, adjusted):
            report.entries[c] = replace(report.entries[c], p_adjusted=p)
    return report


@dataclass(frozen=True)
class AttributionEntry:
    country: str
    language: str
    baseline_share: float
    treatment_share: float
    delta: float
    result: TestResult


def attribute_languages(
    table: CountTable,
    country: str,
    windows: WindowPair | None = None,
    threshold: float = 0.01,
    min_support: int = DEFAULT_MIN_SUPPORT,
    equal_var: bool = False,
) -> list[AttributionEntry]:
    """Per-language share tests for languages at or above ``threshold`` baseline share.

    Shares and deltas are pooled over each window; the test compares the
    language's monthly shares (zero where absent). Sorted by |delta|.
    """
    windows = windows or WindowPair()
    treat, _ = usable_months(table, country, windows.treatment, min_support)
    base, _ = usable_months(table, country, windows.baseline, min_support)
    if len(treat) < 2 or len(base) < 2:
        raise InsufficientData(f"{country}: not enough usable months for attribution")
    pooled_b = distribution(table, country, base)
    pooled_t = distribution(table, country, treat)
    languages = sorted(set(pooled_b.shares) | set(pooled_t.shares))

    def monthly(lang: str, months: list[str]) -> list[float]:
        return [table.count(country, m, lang) / table.count(country, m) for m in months]

    entries = []
    for lang in languages:
        sb, st = pooled_b.get(lang), pooled_t.get(lang)
        if sb < threshold:
            continue
        result = welch_t_test(monthly(lang, treat), monthly(lang, base), equal_var)
        entries.append(AttributionEntry(country, lang, sb, st, st - sb, result))
    entries.sort(key=lambda e: (-abs(e.delta), e.language))
    return entries


def write_attribution_csv(entries: Iterable[AttributionEntry], path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["country", "language", "normal_share", "covid_share", "p"])
        for e in entries:
            w.writerow([e.country, e.language, f"{e.baseline_share:.10g}",
                        f"{e.treatment_share:.10g}", f"{e.result.p_value:.10g}"])


@dataclass
class StabilityReport:
    regions: dict[str, TestResult] = field(default_factory=dict)
    countries: dict[str, TestResult] = field(default_factory=dict)

    def write_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["level", "unit", "t", "df", "p", "class"])
            for level, results in (("region", self.regions), ("country", self.countries)):
                for unit in sorted(results):
                    r = results[unit]
                    w.writerow([level, unit, f"{r.t_statistic:.10g}", f"{r.degrees_of_freedom:.10g}",
                                f"{r.p_value:.10g}", r.significance_class.value])


def _resolve_split(months: list[str], split) -> tuple[list[str], list[str]]:
    if split is None:
        return split_halves(months)
    first, second = (sorted(s) for s in split)
    return first, second


def _share_test(series: Mapping[str, Mapping[str, float]], unit: str,
                first: list[str], second: list[str], equal_var: bool) -> TestResult:
    a = [series[m].get(unit, 0.0) for m in first]
    b = [series[m].get(unit, 0.0) for m in second]
    return welch_t_test(a, b, equal_var)


def stability_screen(
    table: CountTable,
    registry: Mapping[str, str],
    split: tuple[Iterable[str], Iterable[str]] | None = None,
    equal_var: bool = False,
) -> StabilityReport:
    """Is each region's and country's share of global volume stable across the period?"""
    months = table.months()
    if len(months) < 4:
        raise InsufficientMonths(f"need at least 4 months, got {len(months)}")
    first, second = _resolve_split(months, split)
    if len(first) < 2 or len(second) < 2:
        raise InsufficientMonths("each half of the split needs 2 months")
    report = StabilityReport()
    rollup = region_shares(table, registry)
    for region in rollup.regions():
        report.regions[region] = _share_test(rollup.shares, region, first, second, equal_var)
    volumes = volume_by(table, lambda c: c)
    country_shares = {
        m: {c: n / sum(per.values()) for c, n in per.items()} for m, per in volumes.items()
    }
    for country in table.countries():
        report.countries[country] = _share_test(country_shares, country, first, second, equal_var)
    return report


def diversity_stability(
    table: CountTable,
    country: str,
    min_support: int = DEFAULT_MIN_SUPPORT,
    split: tuple[Iterable[str], Iterable[str]] | None = None,
    equal_var: bool = False,
) -> TestResult:
    """First-half vs second-half monthly HHI over the country's full series."""
    series = hhi_series(table, country, min_support)
    months = series.months()
    if len(months) < 4:
        raise InsufficientMonths(f"{country}: {len(months)} non-thin months (need 4)")
    first, second = _resolve_split(months, split)
    first = [m for m in first if m in series.points and m not in series.thin]
    second = [m for m in second if m in series.points and m not in series.thin]
    if len(first) < 2 or len(second) < 2:
        raise InsufficientMonths(f"{country}: split leaves fewer than 2 months per half")
    return welch_t_test(series.values(first), series.values(second), equal_var)
