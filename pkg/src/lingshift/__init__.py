"""Geographic linguistic diversity from geo-tagged, language-labelled records.

Typical flow: stream records into a CountTable, compute monthly HHI per
country, then compare aligned treatment/baseline windows.
"""

from .aggregation import CountTable, LanguageDistribution, distribution, merge, region_shares
from .corpus import IngestConfig, Record, stream_records, validate
from .did import DidWindows, classify_did, did_analyze, did_summary
from .diversity import HhiSeries, HhiValue, hhi, hhi_baseline, hhi_series
from .shift import WindowPair, attribute_languages, detect_shift, diversity_stability, stability_screen
from .stats import classify, pearson, t_sf, welch_t_test

__all__ = [
    "CountTable", "LanguageDistribution", "distribution", "merge", "region_shares",
    "IngestConfig", "Record", "stream_records", "validate",
    "DidWindows", "classify_did", "did_analyze", "did_summary",
    "HhiSeries", "HhiValue", "hhi", "hhi_baseline", "hhi_series",
    "WindowPair", "attribute_languages", "detect_shift", "diversity_stability", "stability_screen",
    "classify", "pearson", "t_sf", "welch_t_test",
]
__version__ = "0.1.0"
