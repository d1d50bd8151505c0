"""Calendar-month helpers.

Months are carried as ``"YYYY-MM"`` strings everywhere: they sort
lexicographically in calendar order and serialize without conversion.
"""

from __future__ import annotations

import re
from typing import Iterable

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")


def parse_month(value: str) -> tuple[int, int]:
    m = _MONTH_RE.match(value)
    if not m or not 1 <= int(m.group(2)) <= 12:
        raise ValueError(f"not a YYYY-MM month: {value!r}")
    return int(m.group(1)), int(m.group(2))


def format_month(year: int, month: int) -> str:
    return f"{year:04d}-{month:02d}"


def add_months(value: str, n: int) -> str:
    year, month = parse_month(value)
    idx = year * 12 + (month - 1) + n
    return format_month(idx // 12, idx % 12 + 1)


def month_range(start: str, end: str) -> list[str]:
    """Inclusive list of months from ``start`` to ``end``."""
    y0, m0 = parse_month(start)
    y1, m1 = parse_month(end)
    n = (y1 * 12 + m1) - (y0 * 12 + m0)
    if n < 0:
        raise ValueError(f"empty month range {start}..{end}")
    return [add_months(start, k) for k in range(n + 1)]


def month_of_year(value: str) -> int:
    return parse_month(value)[1]


def year_of(value: str) -> int:
    return parse_month(value)[0]


def split_halves(months: Iterable[str]) -> tuple[list[str], list[str]]:
    """Split sorted months at the midpoint; an odd extra month goes second."""
    ordered = sorted(months)
    mid = len(ordered) // 2
    return ordered[:mid], ordered[mid:]
