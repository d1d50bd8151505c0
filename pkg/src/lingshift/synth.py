"""Synthetic corpora from explicit local / non-local population mixtures.

Each (country, month) cell is one multinomial draw. The expected language
distribution of a cell is the volume-weighted mixture of its groups, with
non-local groups scaled by the restriction factor during restriction
months. Randomness comes from numpy's PCG64 seeded per cell with
``SeedSequence([seed, year, month, *country_bytes])``, so cells can be
generated in any order, or in parallel, with identical output.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .aggregation import CountTable, LanguageDistribution
from .diversity import hhi_of_shares
from .errors import ConfigError, PathNotFound, ZeroVolume
from .months import month_range, parse_month


@dataclass(frozen=True)
class Schedule:
    """Expected monthly volume: ``base + trend * k`` in the k-th month, unless overridden."""

    base: float
    trend: float = 0.0
    monthly: Mapping[str, float] = field(default_factory=dict)

    def volume(self, month: str, start: str) -> float:
        if month in self.monthly:
            return float(self.monthly[month])
        (y0, m0), (y, m) = parse_month(start), parse_month(month)
        return self.base + self.trend * ((y - y0) * 12 + (m - m0))


@dataclass(frozen=True)
class Group:
    label: str
    languages: Mapping[str, float]
    schedule: Schedule
    nonlocal_: bool = False

    def __post_init__(self):
        if any(v < 0 for v in self.languages.values()):
            raise ConfigError(f"group {self.label}: negative language share")
        if abs(math.fsum(self.languages.values()) - 1.0) > 1e-9:
            raise ConfigError(f"group {self.label}: language shares must sum to 1")


@dataclass(frozen=True)
class PopulationSpec:
    country: str
    groups: tuple[Group, ...]
    seed: int | None = None


def expected_distribution(
    spec: PopulationSpec, month: str, start: str | None = None, restriction_factor: float = 1.0
) -> LanguageDistribution:
    """Exact volume-weighted mixture; non-local groups scaled by ``restriction_factor``.

    ``support_count`` carries the rounded expected cell volume.
    """
    weights, volume = _mixture(spec, month, start or month, restriction_factor)
    return LanguageDistribution(weights, round(volume))


def _mixture(spec: PopulationSpec, month: str, start: str,
             factor: float) -> tuple[dict[str, float], float]:
    pooled: dict[str, float] = {}
    total = 0.0
    for g in spec.groups:
        v = g.schedule.volume(month, start) * (factor if g.nonlocal_ else 1.0)
        if v < 0:
            raise ConfigError(f"{spec.country}/{g.label}: negative volume in {month}")
        total += v
        for lang, s in g.languages.items():
            if s > 0:
                pooled[lang] = pooled.get(lang, 0.0) + v * s
    if total <= 0:
        raise ZeroVolume(f"{spec.country}: zero expected volume in {month}")
    return {k: w / total for k, w in sorted(pooled.items()) if w > 0}, total


@dataclass(frozen=True)
class Scenario:
    populations: tuple[PopulationSpec, ...]
    date_range: tuple[str, str]
    restriction_months: frozenset[str] = frozenset()
    restriction_factor: float = 0.0
    seed: int = 0

    def __post_init__(self):
        months = set(self.months())
        if not self.restriction_months <= months:
            raise ConfigError("restriction months fall outside the date range")
        if not 0.0 <= self.restriction_factor <= 1.0:
            raise ConfigError("restriction factor must lie in [0, 1]")
        names = [p.country for p in self.populations]
        if len(set(names)) != len(names):
            raise ConfigError("a country appears twice in the scenario")

    def months(self) -> list[str]:
        return month_range(*self.date_range)

    def factor(self, month: str) -> float:
        return self.restriction_factor if month in self.restriction_months else 1.0

    def expected(self, spec: PopulationSpec, month: str) -> LanguageDistribution:
        return expected_distribution(spec, month, self.date_range[0], self.factor(month))

    def cell_rng(self, spec: PopulationSpec, month: str) -> np.random.Generator:
        seed = self.seed if spec.seed is None else spec.seed
        year, mon = parse_month(month)
        entropy = [seed & 0xFFFFFFFFFFFFFFFF, year, mon, *spec.country.encode("ascii")]
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


@dataclass(frozen=True)
class ManifestCell:
    country: str
    month: str
    volume: int
    shares: dict[str, float]
    hhi: float


def _draw(scenario: Scenario, spec: PopulationSpec, month: str):
    dist = scenario.expected(spec, month)
    rng = scenario.cell_rng(spec, month)
    langs = list(dist.shares)
    p = np.array([dist.shares[k] for k in langs])
    counts = rng.multinomial(dist.support_count, p / p.sum())
    cell = ManifestCell(spec.country, month, dist.support_count, dist.shares,
                        hhi_of_shares(dist.shares.values()))
    return cell, langs, counts, rng


def generate_table(scenario: Scenario) -> tuple[CountTable, list[ManifestCell]]:
    """Draw every cell straight into a CountTable (no record file)."""
    table = CountTable()
    manifest = []
    for spec in sorted(scenario.populations, key=lambda p: p.country):
        for month in scenario.months():
            cell, langs, counts, _ = _draw(scenario, spec, month)
            manifest.append(cell)
            for lang, n in zip(langs, counts):
                table.add(spec.country, month, lang, int(n))
    return table, manifest


def write_manifest(manifest: Iterable[ManifestCell], path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["country", "month", "language", "expected_share", "expected_hhi", "expected_volume"])
        for cell in manifest:
            for lang in sorted(cell.shares):
                w.writerow([cell.country, cell.month, lang, repr(cell.shares[lang]),
                            repr(cell.hhi), cell.volume])


def read_manifest(path: str | Path) -> list[ManifestCell]:
    cells: dict[tuple[str, str], ManifestCell] = {}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            key = (row["country"], row["month"])
            if key not in cells:
                cells[key] = ManifestCell(key[0], key[1], int(row["expected_volume"]), {},
                                          float(row["expected_hhi"]))
            cells[key].shares[row["language"]] = float(row["expected_share"])
    return list(cells.values())


def _month_bounds(month: str) -> tuple[int, int]:
    year, mon = parse_month(month)
    start = np.datetime64(f"{month}-01T00:00:00", "s")
    nxt = f"{year + mon // 12:04d}-{mon % 12 + 1:02d}"
    end = np.datetime64(f"{nxt}-01T00:00:00", "s")
    return int(start.astype(np.int64)), int(end.astype(np.int64))


def generate(scenario: Scenario, corpus_path: str | Path,
             manifest_path: str | Path) -> tuple[CountTable, list[ManifestCell]]:
    """Write a JSON-lines corpus and the expected-value manifest.

    Records are the drawn counts expanded in shuffled order, with timestamps
    uniform over the month and lengths uniform in [40, 280].
    """
    table = CountTable()
    manifest = []
    with Path(corpus_path).open("w", encoding="utf-8", newline="\n") as out:
        for spec in sorted(scenario.populations, key=lambda p: p.country):
            for month in scenario.months():
                cell, langs, counts, rng = _draw(scenario, spec, month)
                manifest.append(cell)
                labels = np.repeat(np.array(langs, dtype=object), counts)
                rng.shuffle(labels)
                lo, hi = _month_bounds(month)
                stamps = np.sort(rng.integers(lo, hi, size=len(labels))).astype("datetime64[s]")
                chars = rng.integers(40, 281, size=len(labels))
                prefix = f"{spec.country}-{month}-"
                out.writelines(
                    f'{{"id":"{prefix}{k:07d}","ts":"{ts}Z","country":"{spec.country}",'
                    f'"lang":"{lang}","chars":{c},"rt":false}}\n'
                    for k, (lang, ts, c) in enumerate(zip(labels, stamps.astype(str), chars.tolist()))
                )
                for lang, n in zip(langs, counts):
                    table.add(spec.country, month, lang, int(n))
    write_manifest(manifest, manifest_path)
    return table, manifest


def solve_two_group_mixture(local_share: float, nonlocal_share: float,
                            normal_target: float, restricted_target: float) -> tuple[float, float]:
    """Volumes hitting target shares of one language in a local + non-local mix.

    Returns (non-local volume per unit local volume, restriction factor) such
    that the language's expected share is ``normal_target`` normally and
    ``restricted_target`` when the non-local group is scaled by the factor.
    """
    def ratio(target: float) -> float:
        if not min(local_share, nonlocal_share) <= target <= max(local_share, nonlocal_share):
            raise ConfigError(f"target {target} not reachable between {local_share} and {nonlocal_share}")
        return (target - local_share) / (nonlocal_share - target)

    normal, restricted = ratio(normal_target), ratio(restricted_target)
    if normal <= 0:
        raise ConfigError("normal target needs a positive non-local volume")
    factor = restricted / normal
    if not 0.0 <= factor <= 1.0:
        raise ConfigError(f"targets imply restriction factor {factor} outside [0, 1]")
    return normal, factor


def _schedule_from(cfg: Mapping) -> Schedule:
    monthly = {str(k): float(v) for k, v in (cfg.get("monthly") or {}).items()}
    return Schedule(float(cfg.get("volume", 0.0)), float(cfg.get("trend", 0.0)), monthly)


def _month_set(value) -> frozenset[str]:
    if value is None:
        return frozenset()
    if isinstance(value, Mapping):
        return frozenset(month_range(str(value["start"]), str(value["end"])))
    return frozenset(str(m) for m in value)


def scenario_from_dict(cfg: Mapping, seed: int | None = None) -> Scenario:
    """Build a Scenario from the declarative mapping (see README for the schema)."""
    try:
        pops = []
        for entry in cfg["countries"]:
            groups = tuple(
                Group(
                    str(g.get("label", f"group{i}")),
                    {str(k): float(v) for k, v in g["languages"].items()},
                    _schedule_from(g),
                    bool(g.get("nonlocal", False)),
                )
                for i, g in enumerate(entry["groups"])
            )
            pops.append(PopulationSpec(str(entry["country"]), groups, entry.get("seed")))
        restriction = cfg.get("restriction") or {}
        start, end = (str(m) for m in cfg["date_range"])
        return Scenario(
            tuple(pops),
            (start, end),
            _month_set(restriction.get("months")),
            float(restriction.get("factor", 0.0)),
            int(cfg.get("seed", 0) if seed is None else seed),
        )
    except (KeyError, TypeError, AttributeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad scenario config: {exc!r}") from exc


def load_scenario(path: str | Path, seed: int | None = None) -> Scenario:
    path = Path(path)
    if not path.exists():
        raise PathNotFound(f"scenario config not found: {path}")
    with path.open(encoding="utf-8") as fh:
        return scenario_from_dict(yaml.safe_load(fh), seed)


# Scenario builders used by the Monte Carlo checks and scripts.

LANGUAGE_POOL = ("eng", "spa", "por", "fra", "ara", "rus", "deu", "ind", "tur", "swa",
                 "hin", "jpn", "ita", "nld", "tir", "mlg", "amh", "kor", "tha", "vie")


def _constant_group(label, languages, volume, nonlocal_=False) -> Group:
    return Group(label, languages, Schedule(volume), nonlocal_)


def _random_mixture(rng: np.random.Generator, volume: float):
    k = int(rng.integers(2, 7))
    local_langs = rng.choice(LANGUAGE_POOL, size=k, replace=False)
    local = dict(zip(local_langs.tolist(), rng.dirichlet(np.ones(k)).tolist()))
    m = int(rng.integers(1, 4))
    visitor_langs = rng.choice(LANGUAGE_POOL, size=m, replace=False)
    visitor = dict(zip(visitor_langs.tolist(), rng.dirichlet(np.full(m, 0.5)).tolist()))
    share = float(rng.uniform(0.15, 0.6))
    return local, visitor, volume * (1 - share), volume * share


def _normalized(d: Mapping[str, float]) -> dict[str, float]:
    s = math.fsum(d.values())
    return {k: v / s for k, v in d.items() if v > 0}


def random_shift_scenario(seed: int, min_delta_hhi: float = 0.05, volume: float = 50_000,
                          country: str = "NZL") -> tuple[Scenario, float]:
    """One country whose non-local group vanishes in Mar-Aug 2020.

    Redraws the mixture until removing the visitors moves expected HHI by at
    least ``min_delta_hhi``; returns the scenario and that expected change.
    """
    rng = np.random.default_rng([seed, 0x5EED])
    while True:
        local, visitor, v_local, v_visit = _random_mixture(rng, volume)
        spec = PopulationSpec(country, (
            _constant_group("locals", _normalized(local), v_local),
            _constant_group("visitors", _normalized(visitor), v_visit, nonlocal_=True),
        ))
        normal = expected_distribution(spec, "2019-03")
        restricted = expected_distribution(spec, "2020-03", restriction_factor=0.0)
        delta = hhi_of_shares(restricted.shares.values()) - hhi_of_shares(normal.shares.values())
        if abs(delta) >= min_delta_hhi:
            break
    scenario = Scenario((spec,), ("2019-03", "2020-08"),
                        frozenset(month_range("2020-03", "2020-08")), 0.0, seed)
    return scenario, delta


def null_scenario(seed: int, countries: Iterable[str] = ("AUS", "BEL", "ERI", "MDG", "NZL"),
                  volume: float = 50_000) -> Scenario:
    """Random mixtures with restriction factor 1: no true change anywhere."""
    rng = np.random.default_rng([seed, 0x0])
    specs = []
    for c in countries:
        local, visitor, v_local, v_visit = _random_mixture(rng, volume)
        specs.append(PopulationSpec(c, (
            _constant_group("locals", _normalized(local), v_local),
            _constant_group("visitors", _normalized(visitor), v_visit, nonlocal_=True),
        )))
    return Scenario(tuple(specs), ("2019-03", "2020-08"),
                    frozenset(month_range("2020-03", "2020-08")), 1.0, seed)


def english_reduction_scenario(normal: float, restricted: float, country: str = "ERI",
                               volume: float = 50_000, seed: int = 0,
                               local: Mapping[str, float] | None = None,
                               visitors: Mapping[str, float] | None = None) -> Scenario:
    """A country whose English share falls from ``normal`` to ``restricted``.

    Locals use some English; visitors mostly English. Volumes are solved so
    normal months carry ``volume`` records.
    """
    local = dict(local or {"eng": 0.05, "tir": 0.55, "ara": 0.3, "amh": 0.1})
    visitors = dict(visitors or {"eng": 0.95, "ita": 0.05})
    ratio, factor = solve_two_group_mixture(local["eng"], visitors["eng"], normal, restricted)
    v_local = volume / (1 + ratio)
    spec = PopulationSpec(country, (
        _constant_group("locals", local, v_local),
        _constant_group("visitors", visitors, v_local * ratio, nonlocal_=True),
    ))
    return Scenario((spec,), ("2019-03", "2020-08"),
                    frozenset(month_range("2020-03", "2020-08")), factor, seed)
