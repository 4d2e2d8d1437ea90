import math

import pytest
from hypothesis import given, strategies as st

from nrthreat.errors import NonPositiveDistance, ZeroFraction
from nrthreat.grid import GridConfig
from nrthreat.threat import (
    DEFAULT_ATTACKS,
    TABLE_COLUMNS,
    ParamsRequired,
    assess,
    complexity_score,
    jamming_gain,
    js_frame,
    link_budget,
    override_attacks,
    ranking_scatter,
    raw_csv,
    round_db,
    scatter_csv,
    spoofing_re_count,
    table_csv,
)


@pytest.fixture(scope="module")
def entries():
    return {e.channel: e for e in assess()}


def test_js_frame_examples():
    assert js_frame(0.0, 0.017) == pytest.approx(-17.7, abs=0.05)
    assert js_frame(0.0, 1.0) == 0.0
    assert js_frame(10.0, 0.001) == pytest.approx(-20.0)
    with pytest.raises(ZeroFraction):
        js_frame(0.0, 0.0)
    with pytest.raises(ValueError):
        js_frame(0.0, 1.2)


@given(st.floats(-30, 30), st.floats(1e-6, 1.0))
def test_js_frame_round_trip(g, f):
    assert js_frame(g, f) - 10 * math.log10(f) == pytest.approx(g, abs=1e-9)
    assert js_frame(g, f) <= g


def test_jamming_gain():
    assert jamming_gain(240 / 1272) == pytest.approx(7.2, abs=0.05)
    assert jamming_gain(1.0) == 0.0
    assert jamming_gain(0.5) == pytest.approx(3.01, abs=0.005)
    with pytest.raises(ZeroFraction):
        jamming_gain(0.0)


def test_complexity_examples():
    assert complexity_score(False, ParamsRequired.NONE) == 0
    assert complexity_score(True, "High") == 4
    assert complexity_score(True, ParamsRequired.NONE) == 1


def test_round_db_ties_away_from_zero():
    assert [round_db(x) for x in (-0.5, 0.5, -1.5, 2.5, -0.46, -17.7)] == [-1, 1, -2, 3, 0, -18]


def test_link_budget():
    assert link_budget(20, 3, 2, 40, 1.0) == pytest.approx(-17.0)
    assert link_budget(20, 0, 2, 40, 20.0) - link_budget(20, 0, 2, 40, 10.0) == pytest.approx(-6.02, abs=0.01)
    assert link_budget(30, 0, 3.5, 40, 100.0) == pytest.approx(-80.0)
    with pytest.raises(NonPositiveDistance):
        link_budget(30, 0, 2, 40, 0.0)


def test_nine_rows(entries):
    assert len(entries) == 9
    assert set(entries) == {a.name for a in DEFAULT_ATTACKS}


def test_entry_values(entries):
    dmrs = entries["PBCH DM-RS"]
    assert dmrs.re_fraction == pytest.approx(0.0042, abs=5e-5)
    assert dmrs.js_frame_db == pytest.approx(-20.8, abs=0.05)
    assert entries["PDSCH (Downlink)"].js_frame_db == pytest.approx(-0.46, abs=0.01)
    assert entries["PSS (Spoofing)"].re_fraction == pytest.approx(spoofing_re_count() / 171360)
    for e in entries.values():
        assert e.js_frame_db <= e.js_ch_db
        assert e.complexity_score >= 0


def test_scatter_claims(entries):
    pts = {p.attack: p for p in ranking_scatter(list(entries.values()))}
    spoof = pts["PSS (Spoofing)"]
    assert spoof.complexity == 0 and spoof.efficiency_db == pytest.approx(20, abs=1)
    assert 0.4 <= pts["PDSCH (Downlink)"].efficiency_db <= 1.0
    assert pts["PUCCH"].complexity == 4 and pts["PUCCH"].efficiency_db == pytest.approx(10, abs=0.5)
    strong_zero = [p for p in pts.values() if p.complexity == 0 and p.efficiency_db >= 15]
    assert strong_zero == [spoof]
    low = [p for p in pts.values() if p.complexity <= 1]
    assert max(low, key=lambda p: p.efficiency_db) is spoof
    with pytest.raises(ValueError):
        ranking_scatter([])


def test_override_shifts_exactly(entries):
    shifted = {e.channel: e for e in assess(attacks=override_attacks(DEFAULT_ATTACKS, {"PBCH": {"js_ch_db": 3.0}}))}
    assert shifted["PBCH"].js_frame_db - entries["PBCH"].js_frame_db == pytest.approx(3.0, abs=1e-12)
    with pytest.raises(KeyError):
        override_attacks(DEFAULT_ATTACKS, {"PBSCH": {}})


def test_non_baseline_warns(caplog):
    assess(GridConfig(bw_mhz=40))
    assert "non-baseline" in caplog.text


def test_csv_exports(entries):
    rows = list(entries.values())
    table = table_csv(rows).splitlines()
    assert table[0].split(",") == list(TABLE_COLUMNS)
    assert len(table) == 10
    assert len(scatter_csv(ranking_scatter(rows)).splitlines()) == len(table)
    assert "-17.745" in raw_csv(rows)
    assert table_csv(assess()) == table_csv(rows)
