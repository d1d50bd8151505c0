"""Difference-in-differences screening of HHI shifts against pre-existing trends.

Two pairwise tests over the same calendar months in three consecutive
years: pre vs mid (baseline change) and mid vs post (treatment change).
A rule on the two p-values then labels each country.
"""

from __future__ import annotations

import csv
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .aggregation import CountTable
from .diversity import hhi_series
from .errors import ConfigError, InsufficientData, LingshiftError, NoSignificantCountries
from .months import format_month, month_of_year, year_of
from .shift import DEFAULT_MIN_SUPPORT, usable_months
from .stats import TestResult, welch_t_test

DEFAULT_AMPLIFICATION_RATIO = 5.0


class DidClass(str, Enum):
    COVID_CREATED = "covid_created"
    COVID_AMPLIFIED = "covid_amplified"
    PRE_EXISTING = "pre_existing"
    NOT_SIGNIFICANT = "not_significant"


@dataclass(frozen=True)
class DidWindows:
    months_of_year: tuple[int, ...] = (7, 8, 9)
    year_pre: int = 2018
    year_mid: int = 2019
    year_post: int = 2020

    def __post_init__(self):
        object.__setattr__(self, "months_of_year", tuple(sorted(self.months_of_year)))
        if not self.months_of_year:
            raise ConfigError("months_of_year is empty")
        if any(not 1 <= m <= 12 for m in self.months_of_year):
            raise ConfigError(f"bad months_of_year {self.months_of_year}")
        if len(set(self.months_of_year)) != len(self.months_of_year):
            raise ConfigError("months_of_year has duplicates")
        if len({self.year_pre, self.year_mid, self.year_post}) != 3:
            raise ConfigError("the three years must be distinct")

    def window(self, year: int) -> list[str]:
        return [format_month(year, m) for m in self.months_of_year]

    @property
    def years(self) -> tuple[int, int, int]:
        return self.year_pre, self.year_mid, self.year_post

    def narrowed_to(self, table: CountTable) -> DidWindows:
        """Keep only months of year that the table covers in all three years."""
        present: dict[int, set[int]] = {}
        for m in table.months():
            present.setdefault(year_of(m), set()).add(month_of_year(m))
        keep = tuple(
            moy for moy in self.months_of_year
            if all(moy in present.get(y, set()) for y in self.years)
        )
        if not keep:
            raise InsufficientData("no month of year is present in all three years")
        return DidWindows(keep, *self.years)


def classify_did(
    p_baseline: float,
    p_covid: float,
    amplification_ratio: float = DEFAULT_AMPLIFICATION_RATIO,
    alpha: float = 0.05,
) -> DidClass:
    for p in (p_baseline, p_covid):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p-value out of [0, 1]: {p}")
    if p_covid >= alpha:
        return DidClass.NOT_SIGNIFICANT
    if p_baseline >= alpha:
        return DidClass.COVID_CREATED
    if p_covid < p_baseline / amplification_ratio:
        return DidClass.COVID_AMPLIFIED
    return DidClass.PRE_EXISTING


@dataclass(frozen=True)
class DidEntry:
    country: str
    baseline: TestResult
    covid: TestResult
    classification: DidClass

    @property
    def p_baseline(self) -> float:
        return self.baseline.p_value

    @property
    def p_covid(self) -> float:
        return self.covid.p_value


def did_analyze(
    table: CountTable,
    country: str,
    windows: DidWindows | None = None,
    min_support: int = DEFAULT_MIN_SUPPORT,
    amplification_ratio: float = DEFAULT_AMPLIFICATION_RATIO,
    equal_var: bool = False,
    alpha: float = 0.05,
) -> DidEntry:
    windows = windows or DidWindows()
    used = {}
    for year in windows.years:
        months, _ = usable_months(table, country, windows.window(year), min_support)
        if len(months) < 2:
            raise InsufficientData(f"{country}: {len(months)} usable months in {year} (need 2)")
        used[year] = months
    series = hhi_series(table, country)
    pre, mid, post = (series.values(used[y]) for y in windows.years)
    baseline = welch_t_test(mid, pre, equal_var)
    covid = welch_t_test(post, mid, equal_var)
    label = classify_did(baseline.p_value, covid.p_value, amplification_ratio, alpha)
    return DidEntry(country, baseline, covid, label)


@dataclass(frozen=True)
class DidSummary:
    created: int
    amplified: int
    pre_existing: int
    not_significant: int

    @property
    def changed(self) -> int:
        return self.created + self.amplified + self.pre_existing

    @property
    def fraction(self) -> float:
        """Share of changed countries whose change is attributed to the treatment period."""
        return (self.created + self.amplified) / self.changed

    def to_line(self) -> str:
        return (f"fraction={self.fraction:.6f} created={self.created} amplified={self.amplified} "
                f"pre_existing={self.pre_existing} not_significant={self.not_significant}")


def did_summary(entries: Iterable[DidEntry | DidClass]) -> DidSummary:
    counts = Counter(e.classification if isinstance(e, DidEntry) else DidClass(e) for e in entries)
    summary = DidSummary(
        counts[DidClass.COVID_CREATED],
        counts[DidClass.COVID_AMPLIFIED],
        counts[DidClass.PRE_EXISTING],
        counts[DidClass.NOT_SIGNIFICANT],
    )
    if summary.changed == 0:
        raise NoSignificantCountries("no country shows a significant treatment-period change")
    return summary


@dataclass
class DidReport:
    windows: DidWindows
    requested_months: tuple[int, ...]
    entries: dict[str, DidEntry] = field(default_factory=dict)
    failures: dict[str, str] = field(default_factory=dict)

    @property
    def narrowed(self) -> bool:
        return self.windows.months_of_year != self.requested_months

    def summary(self) -> DidSummary | None:
        try:
            return did_summary(self.entries.values())
        except NoSignificantCountries:
            return None

    def write(self, table_path: str | Path, summary_path: str | Path) -> None:
        with Path(table_path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["country", "p_baseline", "p_covid", "class"])
            for c in sorted(self.entries):
                e = self.entries[c]
                w.writerow([c, f"{e.p_baseline:.10g}", f"{e.p_covid:.10g}", e.classification.value])
        summary = self.summary()
        line = summary.to_line() if summary else "fraction=NA created=0 amplified=0 pre_existing=0"
        months = ",".join(str(m) for m in self.windows.months_of_year)
        Path(summary_path).write_text(f"{line} months_of_year={months} narrowed={str(self.narrowed).lower()}\n",
                                      encoding="utf-8")


def did_report(
    table: CountTable,
    windows: DidWindows | None = None,
    countries: Iterable[str] | None = None,
    min_support: int = DEFAULT_MIN_SUPPORT,
    amplification_ratio: float = DEFAULT_AMPLIFICATION_RATIO,
    equal_var: bool = False,
    alpha: float = 0.05,
) -> DidReport:
    """did_analyze over all countries, narrowing to months the corpus covers."""
    windows = windows or DidWindows()
    narrowed = windows.narrowed_to(table)
    report = DidReport(narrowed, windows.months_of_year)
    for country in sorted(countries if countries is not None else table.countries()):
        try:
            report.entries[country] = did_analyze(
                table, country, narrowed, min_support, amplification_ratio, equal_var, alpha
            )
        except LingshiftError as exc:
            report.failures[country] = f"{exc.code}: {exc}"
    return report
