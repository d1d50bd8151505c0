"""Production/sampling bias: per-country data volume against demographics."""

from __future__ import annotations

import csv
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .aggregation import CountTable
from .errors import (
    ConfigError,
    DegenerateInput,
    InsufficientMonths,
    InsufficientOverlap,
    PathNotFound,
)
from .months import split_halves
from .stats import CorrelationResult, TestResult, pearson, welch_t_test

COVARIATES = ("population", "internet_population", "gdp")


@dataclass(frozen=True)
class DemographicProfile:
    country: str
    population: float
    internet_population: float
    gdp: float

    def __post_init__(self):
        if min(self.population, self.internet_population, self.gdp) < 0:
            raise ConfigError(f"{self.country}: negative demographic value")
        if self.internet_population > self.population:
            raise ConfigError(f"{self.country}: internet population exceeds population")

    def covariate(self, name: str) -> float:
        if name not in COVARIATES:
            raise KeyError(f"unknown covariate {name!r}; choose from {COVARIATES}")
        return getattr(self, name)


def load_demographics(path: str | Path) -> dict[str, DemographicProfile]:
    """Read ``country,population,internet_population,gdp`` rows."""
    path = Path(path)
    if not path.exists():
        raise PathNotFound(f"demographics file not found: {path}")
    profiles = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"country", *COVARIATES} <= set(reader.fieldnames):
            raise ConfigError(f"{path}: header must include country,{','.join(COVARIATES)}")
        for row in reader:
            c = row["country"].strip()
            profiles[c] = DemographicProfile(c, *(float(row[k]) for k in COVARIATES))
    return profiles


def volume_vector(table: CountTable) -> dict[str, float]:
    """Mean monthly record count per country, over months where it has data."""
    sums: dict[str, int] = {}
    months: dict[str, int] = {}
    for (country, _), n in table.totals.items():
        sums[country] = sums.get(country, 0) + n
        months[country] = months.get(country, 0) + 1
    return {c: sums[c] / months[c] for c in sorted(sums)}


def _transform(values: list[float], log_transform: bool) -> list[float]:
    return [math.log1p(v) for v in values] if log_transform else values


def studentized_residuals(x: Iterable[float], y: Iterable[float]) -> np.ndarray:
    """Externally studentized residuals of the least-squares fit y ~ a + b x."""
    x = np.asarray(list(x), dtype=float)
    y = np.asarray(list(y), dtype=float)
    n = len(x)
    if n < 4:
        raise DegenerateInput("need at least 4 points for studentized residuals")
    design = np.column_stack([np.ones(n), x])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    hat = np.einsum("ij,ji->i", design, np.linalg.pinv(design.T @ design) @ design.T)
    sse = float(resid @ resid)
    s2_loo = (sse - resid**2 / (1 - hat)) / (n - 3)
    with np.errstate(divide="ignore", invalid="ignore"):
        return resid / np.sqrt(np.maximum(s2_loo, 0.0) * (1 - hat))


@dataclass
class BiasReport:
    correlations: dict[str, CorrelationResult] = field(default_factory=dict)
    excluded_countries: list[str] = field(default_factory=list)
    monthly_r: dict[str, float] = field(default_factory=dict)
    # reported only; never applied unless passed back in as exclusions
    suggested_outliers: dict[str, list[str]] = field(default_factory=dict)
    stability: TestResult | None = None

    def to_text(self) -> str:
        lines = [f"excluded = {','.join(self.excluded_countries) or '-'}"]
        for name in sorted(self.correlations):
            res = self.correlations[name]
            lines.append(f"r.{name} = {res.r:.6f}")
            lines.append(f"n.{name} = {res.n}")
        for name in sorted(self.suggested_outliers):
            lines.append(f"suggested_outliers.{name} = {','.join(self.suggested_outliers[name]) or '-'}")
        if self.stability is not None:
            lines.append(f"monthly_r.p = {self.stability.p_value:.6g}")
            lines.append(f"monthly_r.class = {self.stability.significance_class.value}")
        return "\n".join(lines) + "\n"

    def write(self, text_path: str | Path, csv_path: str | Path) -> None:
        Path(text_path).write_text(self.to_text(), encoding="utf-8")
        with Path(csv_path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["covariate", "r", "n", "excluded"])
            for name in sorted(self.correlations):
                res = self.correlations[name]
                w.writerow([name, f"{res.r:.10g}", res.n, ";".join(res.excluded)])


def correlate_demographics(
    volumes: Mapping[str, float],
    profiles: Mapping[str, DemographicProfile],
    exclusions: Iterable[str] = (),
    covariates: Iterable[str] = COVARIATES,
    log_transform: bool = False,
    outlier_threshold: float | None = 3.0,
) -> BiasReport:
    """Pearson r of volume against each covariate over shared, non-excluded countries."""
    excluded = sorted(set(exclusions))
    countries = sorted((set(volumes) & set(profiles)) - set(excluded))
    if len(countries) < 3:
        raise InsufficientOverlap(f"only {len(countries)} countries shared after exclusion")
    x = _transform([float(volumes[c]) for c in countries], log_transform)
    report = BiasReport(excluded_countries=excluded)
    for name in covariates:
        y = _transform([profiles[c].covariate(name) for c in countries], log_transform)
        res = pearson(x, y)
        report.correlations[name] = CorrelationResult(res.r, res.n, list(excluded))
        if outlier_threshold is not None and len(countries) >= 4:
            z = studentized_residuals(x, y)
            report.suggested_outliers[name] = [
                c for c, v in zip(countries, z) if np.isfinite(v) and abs(v) > outlier_threshold
            ]
    return report


def monthly_correlation_stability(
    table: CountTable,
    profiles: Mapping[str, DemographicProfile],
    covariate: str = "population",
    exclusions: Iterable[str] = (),
    log_transform: bool = False,
    equal_var: bool = False,
) -> tuple[dict[str, float], TestResult]:
    """Per-month r of volume vs ``covariate``, then first half vs second half.

    A country with no records in a month counts as zero volume for it.
    """
    months = table.months()
    if len(months) < 4:
        raise InsufficientMonths(f"need at least 4 months, got {len(months)}")
    drop = set(exclusions)
    countries = [c for c in table.countries() if c in profiles and c not in drop]
    if len(countries) < 3:
        raise InsufficientOverlap(f"only {len(countries)} countries with profiles")
    y = _transform([profiles[c].covariate(covariate) for c in countries], log_transform)
    monthly: dict[str, float] = {}
    for month in months:
        x = _transform([float(table.count(c, month)) for c in countries], log_transform)
        try:
            monthly[month] = pearson(x, y).r
        except DegenerateInput:
            continue
    first, second = split_halves(monthly)
    if len(first) < 2 or len(second) < 2:
        raise InsufficientMonths(f"only {len(monthly)} months with a defined correlation")
    result = welch_t_test([monthly[m] for m in first], [monthly[m] for m in second], equal_var)
    return monthly, result
