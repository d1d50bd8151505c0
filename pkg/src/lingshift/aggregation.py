"""Mergeable (country, month, language) count tables and share distributions."""

from __future__ import annotations

import csv
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Record
from .errors import ConfigError, EmptyCell, PathNotFound, UnmappedCountry

Cell = tuple[str, str]  # (country, month)


class CountTable:
    """Counts keyed by (country, month) then language.

    ``totals`` is kept in step with ``cells``; every mutation goes through
    :meth:`add`. Zero counts are never stored.
    """

    __slots__ = ("cells", "totals")

    def __init__(self):
        self.cells: dict[Cell, dict[str, int]] = {}
        self.totals: dict[Cell, int] = {}

    def add(self, country: str, month: str, language: str, n: int = 1) -> CountTable:
        if n < 0 or int(n) != n:
            raise ValueError(f"count must be a non-negative integer, got {n!r}")
        if n == 0:
            return self
        key = (country, month)
        langs = self.cells.get(key)
        if langs is None:
            langs = self.cells[key] = {}
            self.totals[key] = 0
        langs[language] = langs.get(language, 0) + n
        self.totals[key] += n
        return self

    def accumulate(self, record: Record) -> CountTable:
        return self.add(record.country, record.month, record.language)

    def update(self, records: Iterable[Record]) -> CountTable:
        """Fold a record stream into the table in one pass."""
        cells, totals = self.cells, self.totals
        for rec in records:
            ts = rec.timestamp
            key = (rec.country, f"{ts.year:04d}-{ts.month:02d}")
            langs = cells.get(key)
            if langs is None:
                langs = cells[key] = {}
                totals[key] = 0
            langs[rec.language] = langs.get(rec.language, 0) + 1
            totals[key] += 1
        return self

    def copy(self) -> CountTable:
        out = CountTable()
        out.cells = {k: dict(v) for k, v in self.cells.items()}
        out.totals = dict(self.totals)
        return out

    def merge(self, other: CountTable) -> CountTable:
        """Cellwise sum as a new table; neither input is modified."""
        out = self.copy()
        for (country, month), langs in other.cells.items():
            for lang, n in langs.items():
                out.add(country, month, lang, n)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, CountTable):
            return NotImplemented
        return self.cells == other.cells

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def total(self) -> int:
        return sum(self.totals.values())

    def countries(self) -> list[str]:
        return sorted({c for c, _ in self.cells})

    def months(self, country: str | None = None) -> list[str]:
        return sorted({m for c, m in self.cells if country is None or c == country})

    def count(self, country: str, month: str, language: str | None = None) -> int:
        if language is None:
            return self.totals.get((country, month), 0)
        return self.cells.get((country, month), {}).get(language, 0)

    def pooled_counts(self, country: str, months: Iterable[str]) -> dict[str, int]:
        pooled: dict[str, int] = {}
        for month in months:
            for lang, n in self.cells.get((country, month), {}).items():
                pooled[lang] = pooled.get(lang, 0) + n
        return pooled

    def rows(self) -> list[tuple[str, str, str, int]]:
        return sorted(
            (c, m, lang, n)
            for (c, m), langs in self.cells.items()
            for lang, n in langs.items()
        )

    def to_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["country", "month", "language", "count"])
            w.writerows(self.rows())

    @classmethod
    def from_csv(cls, path: str | Path) -> CountTable:
        path = Path(path)
        if not path.exists():
            raise PathNotFound(f"count table not found: {path}")
        table = cls()
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != ["country", "month", "language", "count"]:
                raise ConfigError(f"{path}: expected header country,month,language,count")
            for row in reader:
                table.add(row["country"], row["month"], row["language"], int(row["count"]))
        return table

    @classmethod
    def from_counts(cls, counts: Mapping[tuple[str, str, str], int]) -> CountTable:
        table = cls()
        for (country, month, lang), n in counts.items():
            table.add(country, month, lang, n)
        return table


def accumulate(table: CountTable, record: Record) -> CountTable:
    return table.accumulate(record)


def merge(a: CountTable, b: CountTable) -> CountTable:
    return a.merge(b)


@dataclass(frozen=True)
class LanguageDistribution:
    shares: dict[str, float]
    support_count: int

    @classmethod
    def from_counts(cls, counts: Mapping[str, int]) -> LanguageDistribution:
        total = sum(counts.values())
        if total <= 0:
            return cls({}, 0)
        return cls({k: n / total for k, n in counts.items() if n > 0}, total)

    def top(self, n: int = 5) -> list[tuple[str, float]]:
        return sorted(self.shares.items(), key=lambda kv: (-kv[1], kv[0]))[:n]

    def get(self, language: str) -> float:
        return self.shares.get(language, 0.0)


def distribution(table: CountTable, country: str, months: Iterable[str]) -> LanguageDistribution:
    """Count-weighted distribution pooled over ``months``."""
    months = list(months)
    dist = LanguageDistribution.from_counts(table.pooled_counts(country, months))
    if dist.support_count == 0:
        raise EmptyCell(f"no data for {country} in {months[:3]}{'...' if len(months) > 3 else ''}")
    return dist


@dataclass
class RegionRollup:
    """month -> region -> share of that month's global record volume."""

    shares: dict[str, dict[str, float]] = field(default_factory=dict)

    def regions(self) -> list[str]:
        return sorted({r for per in self.shares.values() for r in per})

    def months(self) -> list[str]:
        return sorted(self.shares)

    def series(self, region: str) -> list[float]:
        return [self.shares[m].get(region, 0.0) for m in self.months()]

    def to_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["month", "region", "share"])
            for month in self.months():
                for region in sorted(self.shares[month]):
                    w.writerow([month, region, f"{self.shares[month][region]:.10g}"])


def volume_by(table: CountTable, key_of) -> dict[str, dict[str, int]]:
    """month -> unit -> record count, where ``key_of(country)`` names the unit."""
    out: dict[str, dict[str, int]] = {}
    for (country, month), n in table.totals.items():
        per = out.setdefault(month, {})
        unit = key_of(country)
        per[unit] = per.get(unit, 0) + n
    return out


def region_shares(table: CountTable, registry: Mapping[str, str]) -> RegionRollup:
    missing = [c for c in table.countries() if c not in registry]
    if missing:
        raise UnmappedCountry(f"countries missing from registry: {missing}")
    volumes = volume_by(table, registry.__getitem__)
    regions = sorted({r for per in volumes.values() for r in per})
    rollup = RegionRollup()
    for month, per in volumes.items():
        total = sum(per.values())
        rollup.shares[month] = {r: per.get(r, 0) / total for r in regions}
    return rollup


def thin_cells(table: CountTable, min_support: int) -> list[Cell]:
    return sorted(k for k, n in table.totals.items() if n < min_support)


def _ingest_one(args) -> tuple[CountTable, object]:
    from .corpus import stream_records

    path, config = args
    stream = stream_records(path, config)
    table = CountTable().update(stream)
    return table, stream.stats


def ingest_files(paths: Iterable[str | Path], config, threads: int = 1):
    """Stream every file into one CountTable; files run in parallel when ``threads`` > 1.

    Per-file tables and stats are merged in input order, so the result does
    not depend on the degree of parallelism.
    """
    from .corpus import IngestStats

    jobs = [(Path(p), config) for p in paths]
    if threads > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_ingest_one, jobs))
    else:
        results = [_ingest_one(job) for job in jobs]
    table, stats = CountTable(), IngestStats()
    for part, part_stats in results:
        table = table.merge(part) if table.cells else part
        stats = stats.merge(part_stats)
    return table, stats
