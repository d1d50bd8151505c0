"""Record model, validation and single-pass streaming ingestion.

Input files hold one record per line, either as JSON objects (the default)
or as CSV rows under a header (``.csv`` extension). Required keys are ``id``,
``ts`` (ISO-8601, UTC assumed when no offset is given), ``country``
(ISO 3166-1 alpha-3), ``lang`` (ISO 639-3) and one of ``chars`` / ``text``.
``rt`` marks retweets. When ``text`` is present its cleaned length replaces
``chars``.
"""

from __future__ import annotations

import csv
import json
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import (
    ConfigError,
    IngestError,
    PathNotFound,
    RecordRejected,
    RejectReason,
)
from .months import parse_month

REQUIRED_KEYS = ("id", "ts", "country", "lang")
_TRUE = {"1", "true", "t", "yes", "y"}
_FALSE = {"0", "false", "f", "no", "n", ""}
_URL_PREFIXES = ("http://", "https://", "www.")


@dataclass(frozen=True, slots=True)
class Record:
    record_id: str
    timestamp: datetime
    country: str
    language: str
    char_count: int
    is_retweet: bool = False

    @property
    def month(self) -> str:
        return f"{self.timestamp.year:04d}-{self.timestamp.month:02d}"


def load_registry(path: str | Path) -> dict[str, str]:
    """Read a ``country,region`` CSV into a mapping."""
    path = Path(path)
    if not path.exists():
        raise PathNotFound(f"country registry not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        return _read_registry(fh)


def _read_registry(fh) -> dict[str, str]:
    registry: dict[str, str] = {}
    reader = csv.DictReader(fh)
    if reader.fieldnames is None or not {"country", "region"} <= set(reader.fieldnames):
        raise ConfigError("registry needs a 'country,region' header")
    for row in reader:
        country, region = row["country"].strip(), row["region"].strip()
        if not country or not region:
            raise ConfigError(f"incomplete registry row: {row}")
        if registry.get(country, region) != region:
            raise ConfigError(f"{country} mapped to two regions")
        registry[country] = region
    return registry


@lru_cache(maxsize=1)
def _bundled_registry() -> tuple[tuple[str, str], ...]:
    with resources.files("lingshift").joinpath("data/regions.csv").open(
        encoding="utf-8", newline=""
    ) as fh:
        return tuple(sorted(_read_registry(fh).items()))


def default_registry() -> dict[str, str]:
    """Bundled alpha-3 -> region mapping over the 16 reporting regions."""
    return dict(_bundled_registry())


@lru_cache(maxsize=1)
def iso639_3_codes() -> frozenset[str]:
    import pycountry

    return frozenset(lang.alpha_3 for lang in pycountry.languages)


@dataclass
class IngestConfig:
    min_chars: int = 40
    drop_retweets: bool = True
    date_range: tuple[str, str] = ("2018-07", "2020-08")
    country_registry: dict[str, str] = field(default_factory=default_registry)
    extra_languages: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.min_chars < 0:
            raise ConfigError("min_chars must be >= 0")
        start, end = self.date_range
        if parse_month(start) > parse_month(end):
            raise ConfigError(f"empty date_range {start}..{end}")
        self.date_range = (start, end)
        self._languages = iso639_3_codes() | frozenset(self.extra_languages)

    def is_language(self, code: str) -> bool:
        return code in self._languages


def clean_text(text: str) -> str:
    """Drop URL and hashtag tokens; remaining tokens joined by single spaces."""
    kept = [
        tok
        for tok in text.split()
        if not tok.startswith("#") and not tok.lower().startswith(_URL_PREFIXES)
    ]
    return " ".join(kept)


def _parse_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        if value in (0, 1):
            return bool(value)
        raise ValueError(value)
    if isinstance(value, str):
        v = value.strip().lower()
        if v in _TRUE:
            return True
        if v in _FALSE:
            return False
    raise ValueError(f"not a boolean: {value!r}")


def _parse_ts(value) -> datetime:
    if not isinstance(value, str):
        raise ValueError("ts must be a string")
    if value.endswith(("Z", "z")):
        value = value[:-1] + "+00:00"
    ts = datetime.fromisoformat(value)
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _parse_chars(raw: Mapping) -> int:
    text = raw.get("text")
    if text is not None and text != "":
        if not isinstance(text, str):
            raise ValueError("text must be a string")
        return len(clean_text(text))
    value = raw.get("chars")
    if value is None or value == "" or isinstance(value, bool):
        raise ValueError("one of chars/text is required")
    if isinstance(value, str):
        value = int(value.strip())
    elif isinstance(value, float) and value.is_integer():
        value = int(value)
    if not isinstance(value, int) or value < 0:
        raise ValueError(f"bad chars: {value!r}")
    return value


def validate(raw: Mapping, config: IngestConfig) -> Record:
    """Turn one parsed line into a Record or raise RecordRejected."""
    try:
        if not isinstance(raw, Mapping):
            raise TypeError("record is not a key/value map")
        for key in REQUIRED_KEYS:
            if raw.get(key) in (None, ""):
                raise ValueError(f"missing {key}")
        record_id = str(raw["id"])
        country = raw["country"]
        language = raw["lang"]
        if not isinstance(country, str) or not isinstance(language, str):
            raise ValueError("country/lang must be strings")
        ts = _parse_ts(raw["ts"])
        chars = _parse_chars(raw)
        rt = raw.get("rt")
        is_rt = False if rt is None else _parse_bool(rt)
    except (ValueError, TypeError, OverflowError) as exc:
        raise RecordRejected(RejectReason.MALFORMED_LINE, str(exc)) from None

    if country not in config.country_registry:
        raise RecordRejected(RejectReason.UNKNOWN_COUNTRY, country)
    if not config.is_language(language):
        raise RecordRejected(RejectReason.UNKNOWN_LANGUAGE, language)
    if chars < config.min_chars:
        raise RecordRejected(RejectReason.TOO_SHORT, str(chars))
    month = f"{ts.year:04d}-{ts.month:02d}"
    if not config.date_range[0] <= month <= config.date_range[1]:
        raise RecordRejected(RejectReason.OUT_OF_RANGE, month)
    if is_rt and config.drop_retweets:
        raise RecordRejected(RejectReason.RETWEET_DROPPED, record_id)
    return Record(record_id, ts, country, language, chars, is_rt)


@dataclass
class IngestStats:
    lines_read: int = 0
    accepted: int = 0
    rejected: dict[str, int] = field(
        default_factory=lambda: {r.value: 0 for r in RejectReason}
    )
    complete: bool = True

    @property
    def total_rejected(self) -> int:
        return sum(self.rejected.values())

    def merge(self, other: IngestStats) -> IngestStats:
        rejected = {k: self.rejected.get(k, 0) + other.rejected.get(k, 0)
                    for k in self.rejected.keys() | other.rejected.keys()}
        return IngestStats(
            lines_read=self.lines_read + other.lines_read,
            accepted=self.accepted + other.accepted,
            rejected={r.value: rejected.get(r.value, 0) for r in RejectReason},
            complete=self.complete and other.complete,
        )

    def to_dict(self) -> dict:
        return {
            "lines_read": self.lines_read,
            "accepted": self.accepted,
            "rejected": dict(self.rejected),
            "complete": self.complete,
        }


_decode = json.JSONDecoder().decode


def _json_rows(fh) -> Iterator[Mapping | None]:
    for line in fh:
        try:
            obj = _decode(line.decode("utf-8"))
        except ValueError:
            # slow path keeps json.loads' encoding detection (BOMs, UTF-16)
            try:
                obj = json.loads(line)
            except ValueError:
                yield None
                continue
        yield obj if isinstance(obj, dict) else None


def _csv_rows(fh) -> Iterator[Mapping | None]:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None:
        return
    header = [h.strip() for h in header]
    width = len(header)
    for row in reader:
        yield dict(zip(header, row)) if len(row) == width else None


class RecordStream:
    """Iterate accepted records of one file; ``stats`` fills in as it goes.

    The stream holds one line at a time, so memory does not depend on file
    size. ``stats.complete`` is False until the file has been fully read.
    """

    def __init__(self, source: str | Path, config: IngestConfig | None = None,
                 keep_rejections: int = 0):
        self.source = Path(source)
        self.config = config or IngestConfig()
        self.stats = IngestStats(complete=False)
        # first few (line number, rejection) pairs, for diagnostics
        self.rejections_seen: list[tuple[int, RecordRejected]] = []
        self.keep_rejections = keep_rejections

    def __iter__(self) -> Iterator[Record]:
        if not self.source.exists():
            raise PathNotFound(f"input not found: {self.source}")
        stats = self.stats
        rejected = stats.rejected
        config = self.config
        is_csv = self.source.suffix.lower() == ".csv"
        try:
            if is_csv:
                fh = self.source.open(encoding="utf-8", errors="replace", newline="")
            else:
                fh = self.source.open("rb")
            with fh:
                rows = _csv_rows(fh) if is_csv else _json_rows(fh)
                for raw in rows:
                    stats.lines_read += 1
                    try:
                        if raw is None:
                            raise RecordRejected(RejectReason.MALFORMED_LINE)
                        record = validate(raw, config)
                    except RecordRejected as rej:
                        rejected[rej.reason.value] += 1
                        if len(self.rejections_seen) < self.keep_rejections:
                            self.rejections_seen.append((stats.lines_read, rej))
                        continue
                    stats.accepted += 1
                    yield record
        except OSError as exc:
            raise IngestError(f"read failed on {self.source}: {exc}", stats) from exc
        stats.complete = True


def stream_records(source: str | Path, config: IngestConfig | None = None) -> RecordStream:
    return RecordStream(source, config)
