from __future__ import annotations

import csv
import math

import numpy as np
import pytest

from lingshift.aggregation import CountTable
from lingshift.corpus import default_registry
from lingshift.diversity import hhi_of_shares
from lingshift.errors import ConfigError, InsufficientData, InsufficientMonths
from lingshift.months import month_range
from lingshift.reference import ENGLISH_REDUCTIONS, REGION_TABLE
from lingshift.shift import (
    Direction,
    WindowPair,
    attribute_languages,
    detect_shift,
    diversity_stability,
    shift_report,
    stability_screen,
    write_attribution_csv,
)
from lingshift.stats import Significance
from lingshift.synth import (
    Group,
    PopulationSpec,
    Scenario,
    Schedule,
    english_reduction_scenario,
    expected_distribution,
    generate_table,
)

TREAT = month_range("2020-03", "2020-08")
BASE = month_range("2019-03", "2019-08")
FULL = month_range("2019-03", "2020-08")


def two_group_scenario(local, visitors, v_local, v_visit, seed=0, factor=0.0, country="XYZ"):
    spec = PopulationSpec(country, (Group("locals", local, Schedule(v_local)),
                                    Group("visitors", visitors, Schedule(v_visit), nonlocal_=True)))
    return spec, Scenario((spec,), ("2019-03", "2020-08"), frozenset(TREAT), factor, seed)


def relabel(table: CountTable, mapping) -> CountTable:
    return CountTable.from_counts({(c, m, mapping.get(l, l)): n for c, m, l, n in table.rows()})


class TestWindows:
    def test_default_aligned(self):
        w = WindowPair()
        assert w.treatment == tuple(TREAT) and w.baseline == tuple(BASE)

    @pytest.mark.parametrize("treat, base", [
        (("2020-03", "2020-08"), ("2020-01", "2020-06")),  # overlap
        (("2020-03", "2020-08"), ("2019-03", "2019-07")),  # unequal length
        (("2020-03", "2020-08"), ("2019-04", "2019-09")),  # month-of-year mismatch
    ])
    def test_rejected(self, treat, base):
        with pytest.raises(ConfigError):
            WindowPair.from_ranges(treat, base)

    def test_twelve_month_offset_same_months_of_year(self):
        w = WindowPair.from_ranges(("2020-01", "2020-12"), ("2019-01", "2019-12"))
        assert [m[5:] for m in w.treatment] == [m[5:] for m in w.baseline]


class TestDetectShift:
    def test_identical_windows(self):
        counts = {"eng": 700, "spa": 200, "por": 100}
        t = CountTable.from_counts({("NZL", m, l): n for m in FULL for l, n in counts.items()})
        e = detect_shift(t, "NZL")
        assert not e.significant and e.p_value == 1.0 and e.tie

    @pytest.mark.parametrize("local, visitors", [
        ({"tir": 1.0}, {"eng": 1.0}),                              # monolingual non-English locals
        ({"eng": 0.8, "mri": 0.1, "spa": 0.1}, {"eng": 0.97, "deu": 0.03}),
        ({"ara": 0.6, "eng": 0.2, "urd": 0.2}, {"eng": 0.4, "tur": 0.3, "ell": 0.3}),
    ])
    def test_mixture_direction(self, local, visitors):
        spec, scenario = two_group_scenario(local, visitors, 30_000, 20_000)
        normal = hhi_of_shares(expected_distribution(spec, "2019-05").shares.values())
        restricted = hhi_of_shares(
            expected_distribution(spec, "2020-05", restriction_factor=0.0).shares.values())
        expected = Direction.MORE_CONCENTRATED if restricted > normal else Direction.MORE_DIVERSE
        table, _ = generate_table(scenario)
        e = detect_shift(table, "XYZ")
        assert e.significant and e.direction is expected
        assert e.hhi_treatment == pytest.approx(restricted, abs=0.005)
        assert e.hhi_baseline == pytest.approx(normal, abs=0.005)

    def test_label_invariant_and_swap_symmetric(self):
        _, scenario = two_group_scenario({"eng": 0.6, "fra": 0.4}, {"eng": 0.9, "deu": 0.1},
                                         3000, 1000, seed=5, factor=0.5)
        table, _ = generate_table(scenario)
        e = detect_shift(table, "XYZ")
        renamed = detect_shift(relabel(table, {"eng": "zzz", "fra": "eng", "deu": "fra"}), "XYZ")
        assert renamed.result == e.result and renamed.direction is e.direction
        swapped = detect_shift(table, "XYZ", WindowPair().swapped())
        assert swapped.p_value == e.p_value
        assert swapped.result.t_statistic == -e.result.t_statistic
        assert swapped.direction is not e.direction

    def test_tie(self):
        half, three_one = {"a": 1, "b": 1}, {"a": 3, "b": 1}
        cells = {"2020-03": half, "2020-04": three_one, "2019-03": three_one, "2019-04": half}
        t = CountTable.from_counts({("X", m, l): 600 * n for m, d in cells.items() for l, n in d.items()})
        w = WindowPair(("2020-03", "2020-04"), ("2019-03", "2019-04"))
        e = detect_shift(t, "X", w)
        assert e.tie and e.direction is Direction.MORE_DIVERSE and e.p_value == 1.0

    def test_thin_months(self):
        t = CountTable.from_counts({("X", m, "a"): (100 if m in ("2020-03", "2020-04", "2020-05",
                                                                 "2020-06", "2020-07") else 900)
                                    for m in FULL})
        with pytest.raises(InsufficientData):
            detect_shift(t, "X")
        e = detect_shift(t, "X", min_support=50)
        assert e.thin_excluded == ()
        t.add("X", "2020-05", "a", 800)
        t.add("X", "2020-04", "b", 800)
        e = detect_shift(t, "X")
        assert e.treatment_months == ("2020-04", "2020-05", "2020-08")
        assert e.thin_excluded == ("2020-03", "2020-06", "2020-07")


class TestShiftReport:
    def test_report_and_exports(self, tmp_path):
        tables = []
        for code, factor in (("ERI", 0.2), ("BEL", 1.0)):
            _, sc = two_group_scenario({"tir": 0.7, "ara": 0.3}, {"eng": 1.0}, 3000, 2000,
                                       seed=1, factor=factor, country=code)
            tables.append(generate_table(sc)[0])
        table = tables[0].merge(tables[1])
        table.add("NZL", "2019-03", "eng", 10)  # too little data: recorded, not fatal
        report = shift_report(table)
        assert report.significant() == ["ERI"]
        assert set(report.failures) == {"NZL"}
        report.write_table(tmp_path / "s.csv")
        report.write_choropleth(tmp_path / "c.csv")
        rows = list(csv.DictReader(open(tmp_path / "s.csv")))
        assert [r["country"] for r in rows] == ["BEL", "ERI"]
        assert list(rows[0]) == ["country", "p", "class", "direction", "hhi_baseline", "hhi_treatment"]
        assert open(tmp_path / "c.csv").read().splitlines()[0] == "country,class"
        adjusted = shift_report(table, adjustment="bh")
        assert adjusted.entries["BEL"].p_value >= report.entries["BEL"].p_value


class TestAttribution:
    def test_eritrea_targets(self):
        normal, restricted = ENGLISH_REDUCTIONS["ERI"]
        table, _ = generate_table(english_reduction_scenario(normal, restricted, seed=3))
        entries = attribute_languages(table, "ERI")
        top = entries[0]
        assert top.language == "eng"
        assert top.delta == pytest.approx(restricted - normal, abs=0.01)
        assert top.baseline_share == pytest.approx(normal, abs=0.01)
        assert top.result.p_value < 0.05
        assert [abs(e.delta) for e in entries] == sorted((abs(e.delta) for e in entries), reverse=True)

    def test_threshold_boundary(self):
        # per baseline month: xx 0.9%, yy exactly 1.0%
        month = {"eng": 600, "fra": 381, "yy": 10, "xx": 9}
        t = CountTable.from_counts({("X", m, l): n for m in FULL for l, n in month.items()})
        langs = {e.language for e in attribute_languages(t, "X")}
        assert langs == {"eng", "fra", "yy"}
        assert {e.language for e in attribute_languages(t, "X", threshold=0.0)} == set(month)

    def test_unchanged(self):
        t = CountTable.from_counts({("X", m, l): n for m in FULL
                                    for l, n in {"eng": 500, "spa": 300, "ita": 200}.items()})
        for e in attribute_languages(t, "X"):
            assert e.delta == 0.0 and e.result.significance_class is Significance.NOT

    def test_zero_sum_deltas(self):
        _, sc = two_group_scenario({"tir": 0.5, "ara": 0.3, "amh": 0.2}, {"eng": 0.9, "ita": 0.1},
                                   3000, 2000, seed=9, factor=0.3)
        table, _ = generate_table(sc)
        assert detect_shift(table, "XYZ").significant
        entries = attribute_languages(table, "XYZ", threshold=0.0)
        assert abs(math.fsum(e.delta for e in entries)) < 1e-9

    def test_language_absent_in_treatment(self):
        base = {"eng": 600, "ita": 400}
        t = CountTable.from_counts({("X", m, l): n for m in BASE for l, n in base.items()}
                                   | {("X", m, "eng"): 1000 for m in TREAT})
        e = {x.language: x for x in attribute_languages(t, "X")}
        assert e["ita"].treatment_share == 0.0 and e["ita"].delta == -0.4

    def test_csv(self, tmp_path):
        t = CountTable.from_counts({("X", m, l): n for m in FULL for l, n in {"a": 3, "b": 1}.items()})
        write_attribution_csv(attribute_languages(t, "X", min_support=0), tmp_path / "a.csv")
        assert open(tmp_path / "a.csv").read() == (
            "country,language,normal_share,covid_share,p\nX,a,0.75,0.75,1\nX,b,0.25,0.25,1\n")


def region_table(seed, double=None, per_month=200_000, jitter=0.1):
    """One country per region at the reference data shares, with month-to-month
    volume noise; ``double`` doubles one region's volume in the second half."""
    registry = default_registry()
    first = {}
    for country, region in sorted(registry.items()):
        first.setdefault(region, country)
    rng = np.random.default_rng(seed)
    months = month_range("2018-07", "2020-08")
    t = CountTable()
    for k, month in enumerate(months):
        for region, (_, _, share) in REGION_TABLE.items():
            lam = per_month * share * math.exp(rng.normal(0, jitter))
            if region == double and k >= len(months) // 2:
                lam *= 2
            t.add(first[region], month, "eng", int(rng.poisson(lam)))
    return t, registry


class TestStabilityScreen:
    def test_stationary_regions_rate(self):
        flagged = total = 0
        for seed in range(30):
            report = stability_screen(*region_table(seed))
            flagged += sum(r.significant for r in report.regions.values())
            total += len(report.regions)
        assert total == 30 * 16
        assert flagged / total <= 0.08

    def test_planted_region_shift(self):
        # doubling one region also shrinks every other share a little, so the
        # planted region is checked for dominance rather than the others for silence
        for seed in range(20):
            report = stability_screen(*region_table(seed, double="Oceania"))
            oceania = report.regions["Oceania"]
            assert oceania.significant
            assert oceania.t_statistic < 0  # first half minus second half
            assert max(report.regions, key=lambda r: abs(report.regions[r].t_statistic)) == "Oceania"

    def test_single_region(self):
        t = CountTable.from_counts({("NZL", m, "eng"): 100 + i for i, m in enumerate(FULL)}
                                   | {("AUS", m, "eng"): 50 for m in FULL})
        report = stability_screen(t, default_registry())
        assert report.regions["Oceania"].p_value == 1.0
        assert report.regions["Oceania"].significance_class is Significance.NOT

    def test_needs_four_months(self):
        t = CountTable.from_counts({("NZL", m, "eng"): 5 for m in FULL[:3]})
        with pytest.raises(InsufficientMonths):
            stability_screen(t, default_registry())


def hhi_noise_table(seed, step=0.0, months=month_range("2018-07", "2020-08")):
    rng = np.random.default_rng(seed)
    t = CountTable()
    for k, m in enumerate(months):
        p_eng = 0.6 + (step if k >= len(months) // 2 else 0.0)
        n = 5000
        eng = int(rng.binomial(n, p_eng))
        t.add("X", m, "eng", eng)
        t.add("X", m, "spa", n - eng)
    return t


class TestDiversityStability:
    def test_constant(self):
        t = CountTable.from_counts({("X", m, l): n for m in FULL for l, n in {"a": 700, "b": 300}.items()})
        r = diversity_stability(t, "X")
        assert r.p_value == 1.0 and r.degenerate

    def test_step(self):
        assert diversity_stability(hhi_noise_table(1, step=0.1), "X").significance_class is Significance.HIGHLY

    def test_null_rate(self):
        quiet = sum(not diversity_stability(hhi_noise_table(s), "X").significant for s in range(100))
        assert quiet >= 90

    def test_too_few(self):
        t = hhi_noise_table(0, months=FULL[:3])
        with pytest.raises(InsufficientMonths):
            diversity_stability(t, "X")
