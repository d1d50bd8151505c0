"""Run configuration: one YAML file drives every subcommand.

Relative paths resolve against the config file's directory. Example::

    paths:
      corpus: [data/part1.jsonl, data/part2.csv]
      registry: regions.csv          # optional, bundled registry otherwise
      demographics: demographics.csv # optional, enables the bias analysis
      output: out
    ingest: {min_chars: 40, drop_retweets: true, date_range: [2018-07, 2020-08]}
    windows:
      treatment: [2020-03, 2020-08]
      baseline: [2019-03, 2019-08]
    did: {months_of_year: [7, 8, 9], years: [2018, 2019, 2020]}
    thresholds: {min_support: 500, attribution: 0.01, amplification_ratio: 5, alpha: 0.05}
    flags: {test: welch, log_transform: false, multiple_comparison: none}
    bias: {exclusions: [USA, CHN, IND], covariate: population}
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .corpus import IngestConfig, default_registry, load_registry
from .did import DidWindows
from .errors import ConfigError, PathNotFound
from .shift import WindowPair


@dataclass
class Paths:
    corpus: list[Path] = field(default_factory=list)
    registry: Path | None = None
    demographics: Path | None = None
    output: Path = Path("out")
    counts: Path | None = None

    @property
    def counts_file(self) -> Path:
        return self.counts or self.output / "counts.csv"


@dataclass
class Thresholds:
    min_support: int = 500
    attribution: float = 0.01
    amplification_ratio: float = 5.0
    alpha: float = 0.05

    def __post_init__(self):
        if self.min_support < 0:
            raise ConfigError("min_support must be >= 0")
        if not 0.0 <= self.attribution < 1.0:
            raise ConfigError("attribution threshold must be in [0, 1)")
        if self.amplification_ratio < 1.0:
            raise ConfigError("amplification_ratio must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must be in (0, 1)")


@dataclass
class Flags:
    test: str = "welch"
    log_transform: bool = False
    multiple_comparison: str = "none"

    def __post_init__(self):
        if self.test not in ("welch", "student"):
            raise ConfigError(f"flags.test must be welch or student, not {self.test!r}")
        if self.multiple_comparison not in ("none", "bh"):
            raise ConfigError("flags.multiple_comparison must be none or bh")

    @property
    def equal_var(self) -> bool:
        return self.test == "student"


@dataclass
class RunConfig:
    paths: Paths = field(default_factory=Paths)
    ingest: IngestConfig = field(default_factory=IngestConfig)
    windows: WindowPair = field(default_factory=WindowPair)
    did: DidWindows = field(default_factory=DidWindows)
    thresholds: Thresholds = field(default_factory=Thresholds)
    flags: Flags = field(default_factory=Flags)
    exclusions: list[str] = field(default_factory=list)
    covariate: str = "population"


def _resolve(base: Path, value) -> Path:
    p = Path(str(value))
    return p if p.is_absolute() else base / p


def _must_exist(path: Path | None) -> Path | None:
    if path is not None and not path.exists():
        raise PathNotFound(f"path not found: {path}")
    return path


def _range(value, what: str) -> tuple[str, str]:
    if isinstance(value, Mapping):
        value = [value.get("start"), value.get("end")]
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{what} must be [start, end] months")
    return str(value[0]), str(value[1])


def config_from_dict(raw: Mapping | None, base: Path = Path(".")) -> RunConfig:
    raw = dict(raw or {})
    unknown = set(raw) - {"paths", "ingest", "windows", "did", "thresholds", "flags", "bias"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    try:
        p = raw.get("paths") or {}
        corpus = p.get("corpus") or []
        if isinstance(corpus, (str, Path)):
            corpus = [corpus]
        paths = Paths(
            corpus=[_must_exist(_resolve(base, c)) for c in corpus],
            registry=_must_exist(_resolve(base, p["registry"])) if p.get("registry") else None,
            demographics=_must_exist(_resolve(base, p["demographics"])) if p.get("demographics") else None,
            output=_resolve(base, p.get("output", "out")),
            counts=_resolve(base, p["counts"]) if p.get("counts") else None,
        )
        ing = raw.get("ingest") or {}
        registry = load_registry(paths.registry) if paths.registry else default_registry()
        ingest = IngestConfig(
            min_chars=int(ing.get("min_chars", 40)),
            drop_retweets=bool(ing.get("drop_retweets", True)),
            date_range=_range(ing.get("date_range", ["2018-07", "2020-08"]), "ingest.date_range"),
            country_registry=registry,
            extra_languages=frozenset(ing.get("extra_languages") or ()),
        )
        win = raw.get("windows") or {}
        windows = WindowPair.from_ranges(
            _range(win.get("treatment", ["2020-03", "2020-08"]), "windows.treatment"),
            _range(win.get("baseline", ["2019-03", "2019-08"]), "windows.baseline"),
        )
        d = raw.get("did") or {}
        years = d.get("years", [2018, 2019, 2020])
        if len(years) != 3:
            raise ConfigError("did.years needs exactly three years")
        did = DidWindows(tuple(int(m) for m in d.get("months_of_year", [7, 8, 9])),
                         *(int(y) for y in years))
        t = raw.get("thresholds") or {}
        thresholds = Thresholds(
            int(t.get("min_support", 500)),
            float(t.get("attribution", 0.01)),
            float(t.get("amplification_ratio", 5.0)),
            float(t.get("alpha", 0.05)),
        )
        f = raw.get("flags") or {}
        flags = Flags(str(f.get("test", "welch")), bool(f.get("log_transform", False)),
                      str(f.get("multiple_comparison", "none")))
        b = raw.get("bias") or {}
        return RunConfig(paths, ingest, windows, did, thresholds, flags,
                         [str(c) for c in b.get("exclusions", [])],
                         str(b.get("covariate", "population")))
    except (TypeError, ValueError, AttributeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad config: {exc}") from exc


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return config_from_dict({}, Path.cwd())
    path = Path(path)
    if not path.exists():
        raise PathNotFound(f"config not found: {path}")
    with path.open(encoding="utf-8") as fh:
        return config_from_dict(yaml.safe_load(fh), path.resolve().parent)
