from __future__ import annotations

import json
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

from lingshift.aggregation import CountTable
from lingshift.corpus import IngestConfig

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

COUNTRIES = ("BEL", "ERI", "ISR", "NZL", "USA")
LANGS = ("eng", "fra", "nld", "tir", "ara", "spa", "heb")
MONTHS = ("2019-03", "2019-04", "2019-05", "2020-03", "2020-04")


def raw_record(i: int = 0, **overrides) -> dict:
    rec = {"id": f"r{i}", "ts": "2019-05-17T12:00:00Z", "country": "BEL",
           "lang": "fra", "chars": 120, "rt": False}
    rec.update(overrides)
    return rec


def write_jsonl(path: Path, rows) -> Path:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(row if isinstance(row, str) else json.dumps(row))
            fh.write("\n")
    return path


@pytest.fixture(scope="session")
def ingest_config() -> IngestConfig:
    return IngestConfig()


count_maps = st.dictionaries(
    st.tuples(st.sampled_from(COUNTRIES), st.sampled_from(MONTHS), st.sampled_from(LANGS)),
    st.integers(min_value=1, max_value=1000),
    max_size=30,
)


@st.composite
def tables(draw) -> CountTable:
    return CountTable.from_counts(draw(count_maps))
