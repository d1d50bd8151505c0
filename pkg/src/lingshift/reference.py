"""Reference figures used as generator targets and validation anchors."""

from __future__ import annotations

# region -> (records in millions, share of world population, share of data)
REGION_TABLE: dict[str, tuple[float, float, float]] = {
    "Africa, Southern": (12.28, 0.010, 0.020),
    "Africa, Sub": (43.87, 0.101, 0.070),
    "Africa, North": (16.60, 0.034, 0.027),
    "America, Brazil": (10.96, 0.028, 0.018),
    "America, Central": (66.12, 0.029, 0.106),
    "America, North": (24.64, 0.048, 0.040),
    "America, South": (77.79, 0.029, 0.125),
    "Asia, East": (15.88, 0.223, 0.026),
    "Asia, Central": (15.08, 0.027, 0.024),
    "Asia, South": (30.06, 0.233, 0.048),
    "Asia, Southeast": (31.88, 0.084, 0.051),
    "Europe, East": (51.48, 0.024, 0.083),
    "Europe, Russia": (9.38, 0.020, 0.015),
    "Europe, West": (155.74, 0.057, 0.250),
    "Middle East": (36.58, 0.045, 0.059),
    "Oceania": (24.92, 0.008, 0.040),
}

# country -> (reported HHI, top-five language shares)
SAMPLE_DISTRIBUTIONS: dict[str, tuple[float, tuple[float, ...]]] = {
    "ISR": (0.207, (0.273, 0.259, 0.235, 0.075, 0.053)),
    "IND": (0.356, (0.508, 0.308, 0.034, 0.025, 0.014)),
    "USA": (0.852, (0.923, 0.026, 0.006, 0.006, 0.004)),
}

# English share, normal period vs travel-restriction period
ENGLISH_REDUCTIONS: dict[str, tuple[float, float]] = {
    "ERI": (0.6316, 0.4194),
    "WSM": (0.4500, 0.3018),
    "CPV": (0.2778, 0.1663),
    "GNQ": (0.3308, 0.2440),
    "MDG": (0.5308, 0.4487),
    "KIR": (0.3110, 0.2356),
    "TZA": (0.3443, 0.2735),
    "MNG": (0.3032, 0.2352),
    "TCD": (0.4548, 0.3971),
    "STP": (0.1257, 0.0714),
    "YEM": (0.1444, 0.0920),
}

LANGUAGE_COUNT = 464

# countries changed / no baseline change / much stronger change / remainder
DID_COUNTS = {"changed": 58, "created": 38, "amplified": 8, "pre_existing": 12}
DID_FRACTION = 0.793
