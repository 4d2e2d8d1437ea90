from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nrthreat.errors import ConfigConflict, UnsupportedCombination
from nrthreat.grid import (
    DOWNLINK_KINDS,
    UPLINK_KINDS,
    ChannelKind as K,
    Direction,
    GridConfig,
    build_grid,
    from_csv,
    from_json,
    occupancy_map,
    pdcch_time_duty_cycle,
    re_counts,
    re_fraction,
    re_fraction_exact,
    region_fraction,
    ssb_symbol_starts,
    to_csv,
    to_json,
)
from nrthreat.numerology import grid_dimensions

PBCH_REGION = (K.PBCH, K.PBCH_DMRS)


def test_default_downlink_counts(dl_grid):
    counts = re_counts(dl_grid)
    assert counts[K.PSS] == counts[K.SSS] == 4 * 127
    assert counts[K.PBCH] + counts[K.PBCH_DMRS] == 240 * 12
    assert counts[K.PBCH_DMRS] == 720
    assert counts[K.PDCCH] == 612 * 20
    assert sum(counts.values()) == 171360


def test_default_downlink_fractions(dl_grid):
    assert region_fraction(dl_grid, PBCH_REGION) == pytest.approx(2880 / 171360)
    assert region_fraction(dl_grid, PBCH_REGION) == pytest.approx(0.0168, abs=5e-5)
    assert re_fraction(dl_grid, K.SSS) == pytest.approx(0.0030, abs=5e-5)
    assert re_fraction(dl_grid, K.PBCH_DMRS) == pytest.approx(0.0042, abs=5e-5)
    assert re_fraction(dl_grid, K.PDSCH) == pytest.approx(0.90, abs=0.005)
    assert re_fraction(dl_grid, K.PUCCH) == 0.0
    assert pdcch_time_duty_cycle(dl_grid) == pytest.approx(1 / 14)


@pytest.mark.parametrize("dur,duty", [(1, 1 / 14), (2, 2 / 14), (3, 3 / 14)])
def test_coreset_duty_cycle(dur, duty):
    g = build_grid(GridConfig(coreset_time_dur=dur))
    assert pdcch_time_duty_cycle(g) == pytest.approx(duty)
    # PDCCH always starts in the first symbol of each slot
    first = g.labels[:, ::14]
    assert np.all(first == K.PDCCH)


def test_sync_signals_are_127_by_one(dl_grid):
    for kind in (K.PSS, K.SSS):
        cols = np.flatnonzero(np.any(dl_grid.labels == kind, axis=0))
        assert len(cols) == 4
        for c in cols:
            rows = np.flatnonzero(dl_grid.labels[:, c] == kind)
            assert rows.size == 127 and rows[-1] - rows[0] == 126


def test_dmrs_every_fourth_subcarrier(dl_grid):
    dmrs_rows = np.flatnonzero(np.any(dl_grid.labels == K.PBCH_DMRS, axis=1))
    assert dmrs_rows.size == 60
    assert set(np.diff(dmrs_rows)) == {4}


def test_ssb_within_first_slots():
    for below in (True, False):
        g = build_grid(GridConfig(carrier_below_3ghz=below))
        ssb = np.isin(g.labels, [K.PSS, K.SSS, K.PBCH, K.PBCH_DMRS])
        last_symbol = np.flatnonzero(ssb.any(axis=0)).max()
        assert last_symbol < (2 if below else 4) * 14
        pbch = np.isin(g.labels, PBCH_REGION).sum()
        assert pbch == 240 * (12 if below else 24)


def test_ssb_doubling_until_budget():
    base = re_counts(build_grid(GridConfig(ssb_blocks_per_frame=2)))
    double = re_counts(build_grid(GridConfig(ssb_blocks_per_frame=4)))
    for k in (K.PSS, K.SSS, K.PBCH, K.PBCH_DMRS):
        assert double[k] == 2 * base[k]
    with pytest.raises(ConfigConflict):
        build_grid(GridConfig(ssb_blocks_per_frame=8))


def test_uplink_defaults(ul_grid):
    assert 0.85 <= re_fraction(ul_grid, K.PUSCH) <= 0.92
    rb = 1 / 51
    assert abs(re_fraction(ul_grid, K.PRACH) - 0.02) <= rb
    assert abs(re_fraction(ul_grid, K.PUCCH) - 0.10) <= rb
    assert re_fraction(ul_grid, K.PSS) == 0.0
    no_pucch = build_grid(GridConfig(direction=Direction.UPLINK, pucch_fraction=0.0))
    assert no_pucch.count(K.PUCCH) == 0


def test_label_sets_respect_direction(dl_grid, ul_grid):
    assert set(np.unique(dl_grid.labels)) <= {int(k) for k in DOWNLINK_KINDS}
    assert set(np.unique(ul_grid.labels)) <= {int(k) for k in UPLINK_KINDS}


@pytest.mark.parametrize("kwargs", [
    {"coreset_time_dur": 4},
    {"pucch_fraction": 1.5},
    {"pbch_dmrs_shift": 4},
    {"ssb_offset_subcarriers": 1000},
    {"direction": "uplink", "pucch_fraction": 0.9, "prach_fraction": 0.2},
])
def test_config_conflicts(kwargs):
    with pytest.raises(ConfigConflict):
        build_grid(GridConfig(**kwargs))


def test_unsupported_bandwidth():
    with pytest.raises(UnsupportedCombination):
        build_grid(GridConfig(bw_mhz=7))


def test_labels_read_only(dl_grid):
    with pytest.raises(ValueError):
        dl_grid.labels[0, 0] = 0


def test_export_round_trip(dl_grid):
    occ = occupancy_map(dl_grid)
    assert occ.shape == (280, 612)
    csv_text = to_csv(occ)
    assert "\r" not in csv_text
    assert np.array_equal(from_csv(csv_text).codes, occ.codes)
    assert np.array_equal(from_json(to_json(occ, dl_grid.dims)).codes, occ.codes)
    assert int(np.count_nonzero(occ.codes == K.PSS)) == 508


grid_configs = st.builds(
    GridConfig,
    bw_mhz=st.sampled_from([5, 10, 15, 20, 40, 50]),
    scs_khz=st.sampled_from([15, 30]),
    carrier_below_3ghz=st.booleans(),
    direction=st.sampled_from(list(Direction)),
    coreset_time_dur=st.sampled_from([1, 2, 3]),
    ssb_offset_subcarriers=st.integers(-20, 20),
    pbch_dmrs_shift=st.integers(0, 3),
    pucch_fraction=st.floats(0.0, 0.3),
    prach_fraction=st.floats(0.0, 0.1),
)


@settings(max_examples=40, deadline=None)
@given(grid_configs)
def test_partition_properties(cfg):
    try:
        dims = grid_dimensions(cfg.bw_mhz, cfg.scs_khz)
    except UnsupportedCombination:
        return
    if cfg.direction is Direction.DOWNLINK and dims.subcarriers < 240 + abs(2 * cfg.ssb_offset_subcarriers):
        # narrow carriers cannot hold the SSB
        if dims.subcarriers < 240:
            with pytest.raises(ConfigConflict):
                build_grid(cfg)
        return
    g = build_grid(cfg)
    counts = re_counts(g)
    assert sum(counts.values()) == g.dims.res_per_frame
    assert sum(re_fraction_exact(g, k) for k in K) == Fraction(1)
    if cfg.direction is Direction.DOWNLINK:
        region = counts[K.PBCH] + counts[K.PBCH_DMRS]
        assert 4 * counts[K.PBCH_DMRS] == region
        assert counts[K.PSS] == 127 * len(ssb_symbol_starts(cfg))
    # determinism
    assert np.array_equal(build_grid(cfg).labels, g.labels)
    assert np.array_equal(build_grid(replace(cfg)).labels, g.labels)
