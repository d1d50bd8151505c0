"""Exception types shared across the package."""

from __future__ import annotations

from enum import Enum


class LingshiftError(Exception):
    """Base class; ``code`` is the machine-readable error name."""

    code = "Error"


class RejectReason(str, Enum):
    MALFORMED_LINE = "MalformedLine"
    UNKNOWN_COUNTRY = "UnknownCountry"
    UNKNOWN_LANGUAGE = "UnknownLanguage"
    TOO_SHORT = "TooShort"
    OUT_OF_RANGE = "OutOfRange"
    RETWEET_DROPPED = "RetweetDropped"


class RecordRejected(LingshiftError):
    code = "RecordRejected"

    def __init__(self, reason: RejectReason, detail: str = ""):
        super().__init__(f"{reason.value}: {detail}" if detail else reason.value)
        self.reason = reason
        self.detail = detail


class IngestError(LingshiftError):
    """I/O failure mid-stream; ``stats`` holds the partial (incomplete) counts."""

    code = "IngestError"

    def __init__(self, message: str, stats=None):
        super().__init__(message)
        self.stats = stats


class PathNotFound(LingshiftError, FileNotFoundError):
    code = "PathNotFound"


class ConfigError(LingshiftError, ValueError):
    code = "ConfigError"


class EmptyCell(LingshiftError, LookupError):
    code = "EmptyCell"


class NoData(LingshiftError, LookupError):
    code = "NoData"


class UnmappedCountry(LingshiftError, LookupError):
    code = "UnmappedCountry"


class EmptyDistribution(LingshiftError, ValueError):
    code = "EmptyDistribution"


class DegenerateInput(LingshiftError, ValueError):
    code = "DegenerateInput"


class InsufficientOverlap(LingshiftError, ValueError):
    code = "InsufficientOverlap"


class InsufficientMonths(LingshiftError, ValueError):
    code = "InsufficientMonths"


class InsufficientData(LingshiftError, ValueError):
    code = "InsufficientData"


class NoSignificantCountries(LingshiftError, ValueError):
    code = "NoSignificantCountries"


class ZeroVolume(LingshiftError, ValueError):
    code = "ZeroVolume"
