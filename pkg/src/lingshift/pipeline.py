"""Analysis orchestration: CountTable + RunConfig -> report bundle on disk.

Every output is sorted by country code and floats are written with fixed
formatting, so identical inputs give byte-identical bundles.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from .aggregation import CountTable, distribution, region_shares, thin_cells
from .bias import (
    BiasReport,
    correlate_demographics,
    load_demographics,
    monthly_correlation_stability,
    volume_vector,
)
from .config import RunConfig
from .did import DidReport, did_report
from .diversity import hhi_baseline, hhi_series, write_choropleth_csv, write_series_csv
from .errors import LingshiftError
from .reports import render_bundle
from .shift import (
    AttributionEntry,
    ShiftReport,
    StabilityReport,
    attribute_languages,
    diversity_stability,
    shift_report,
    stability_screen,
    write_attribution_csv,
)
from .stats import TestResult


@dataclass
class Bundle:
    shift: ShiftReport | None = None
    attribution: list[AttributionEntry] = field(default_factory=list)
    did: DidReport | None = None
    stability: StabilityReport | None = None
    diversity_stability: dict[str, TestResult] = field(default_factory=dict)
    bias: BiasReport | None = None
    failures: list[tuple[str, str, str]] = field(default_factory=list)


def _record(bundle: Bundle, step: str, country: str, exc: LingshiftError) -> None:
    bundle.failures.append((step, country, f"{exc.code}: {exc}"))


def run_shift(table: CountTable, cfg: RunConfig) -> ShiftReport:
    return shift_report(table, cfg.windows, min_support=cfg.thresholds.min_support,
                        equal_var=cfg.flags.equal_var, adjustment=cfg.flags.multiple_comparison)


def run_attribution(table: CountTable, cfg: RunConfig, countries, bundle: Bundle | None = None):
    entries = []
    for country in sorted(countries):
        try:
            entries.extend(attribute_languages(
                table, country, cfg.windows, cfg.thresholds.attribution,
                cfg.thresholds.min_support, cfg.flags.equal_var,
            ))
        except LingshiftError as exc:
            if bundle is not None:
                _record(bundle, "attribute", country, exc)
    return entries


def run_did(table: CountTable, cfg: RunConfig) -> DidReport:
    return did_report(table, cfg.did, min_support=cfg.thresholds.min_support,
                      amplification_ratio=cfg.thresholds.amplification_ratio,
                      equal_var=cfg.flags.equal_var, alpha=cfg.thresholds.alpha)


def run_bias(table: CountTable, cfg: RunConfig) -> BiasReport:
    profiles = load_demographics(cfg.paths.demographics)
    report = correlate_demographics(volume_vector(table), profiles, cfg.exclusions,
                                    log_transform=cfg.flags.log_transform)
    try:
        report.monthly_r, report.stability = monthly_correlation_stability(
            table, profiles, cfg.covariate, cfg.exclusions, cfg.flags.log_transform,
            cfg.flags.equal_var,
        )
    except LingshiftError:
        pass
    return report


def write_bias(report: BiasReport, out: Path) -> None:
    report.write(out / "bias.txt", out / "bias.csv")
    with (out / "bias_monthly.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["month", "r"])
        for m in sorted(report.monthly_r):
            w.writerow([m, f"{report.monthly_r[m]:.10g}"])


def run_stability(table: CountTable, cfg: RunConfig, bundle: Bundle) -> None:
    try:
        bundle.stability = stability_screen(table, cfg.ingest.country_registry,
                                            equal_var=cfg.flags.equal_var)
    except LingshiftError as exc:
        _record(bundle, "stability", "*", exc)
    for country in table.countries():
        try:
            bundle.diversity_stability[country] = diversity_stability(
                table, country, cfg.thresholds.min_support, equal_var=cfg.flags.equal_var)
        except LingshiftError as exc:
            _record(bundle, "diversity_stability", country, exc)


def write_stability(bundle: Bundle, out: Path) -> None:
    if bundle.stability is not None:
        bundle.stability.write_csv(out / "stability.csv")
    with (out / "diversity_stability.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["country", "t", "df", "p", "class"])
        for c in sorted(bundle.diversity_stability):
            r = bundle.diversity_stability[c]
            w.writerow([c, f"{r.t_statistic:.10g}", f"{r.degrees_of_freedom:.10g}",
                        f"{r.p_value:.10g}", r.significance_class.value])


def write_descriptive(table: CountTable, cfg: RunConfig, out: Path) -> None:
    region_shares(table, cfg.ingest.country_registry).to_csv(out / "region_shares.csv")
    write_choropleth_csv(volume_vector(table), out / "volume_choropleth.csv")
    write_series_csv((hhi_series(table, c, cfg.thresholds.min_support) for c in table.countries()),
                     out / "hhi_series.csv")
    baseline = {c: hhi_baseline(table, c, table.months(c)).value for c in table.countries()}
    write_choropleth_csv(baseline, out / "hhi_choropleth.csv")
    with (out / "top_languages.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["country", "rank", "language", "share"])
        for c in table.countries():
            for rank, (lang, share) in enumerate(distribution(table, c, table.months(c)).top(5), 1):
                w.writerow([c, rank, lang, f"{share:.10g}"])
    with (out / "thin_cells.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["country", "month", "count"])
        for c, m in thin_cells(table, cfg.thresholds.min_support):
            w.writerow([c, m, table.count(c, m)])


def write_failures(bundle: Bundle, out: Path) -> None:
    with (out / "failures.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "country", "error"])
        w.writerows(sorted(bundle.failures))


def analyze(table: CountTable, cfg: RunConfig, out: Path) -> Bundle:
    """Run every analysis and write the full bundle into ``out``."""
    out.mkdir(parents=True, exist_ok=True)
    bundle = Bundle()
    write_descriptive(table, cfg, out)

    run_stability(table, cfg, bundle)
    write_stability(bundle, out)

    bundle.shift = run_shift(table, cfg)
    bundle.shift.write_table(out / "shift.csv")
    bundle.shift.write_choropleth(out / "shift_choropleth.csv")
    for c, msg in bundle.shift.failures.items():
        bundle.failures.append(("shift", c, msg))

    bundle.attribution = run_attribution(table, cfg, bundle.shift.significant(), bundle)
    write_attribution_csv(bundle.attribution, out / "attribution.csv")

    try:
        bundle.did = run_did(table, cfg)
        bundle.did.write(out / "did.csv", out / "did_summary.txt")
        for c, msg in bundle.did.failures.items():
            bundle.failures.append(("did", c, msg))
    except LingshiftError as exc:
        _record(bundle, "did", "*", exc)

    if cfg.paths.demographics is not None:
        try:
            bundle.bias = run_bias(table, cfg)
            write_bias(bundle.bias, out)
        except LingshiftError as exc:
            _record(bundle, "bias", "*", exc)

    write_failures(bundle, out)
    (out / "report.txt").write_text(render_bundle(out), encoding="utf-8")
    return bundle
