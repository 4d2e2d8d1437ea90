"""Jamming efficiency and attacker-complexity metrics per channel.

Efficiency compares a targeted attack with barrage jamming of the whole frame:
an attack that needs J/S_CH on a fraction f of the frame's REs costs
J/S_F = J/S_CH + 10 log10(f) when averaged over the frame, assuming a flat
signal PSD.
"""

from __future__ import annotations

import csv
import enum
import io
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .errors import NonPositiveDistance, ZeroFraction
from .grid import (
    ChannelKind,
    Direction,
    GridConfig,
    ResourceGrid,
    build_grid,
)
from .sequences import SEQ_LEN

log = logging.getLogger(__name__)


class ParamsRequired(enum.IntEnum):
    NONE = 0
    LOW = 1
    MEDIUM = 2
    HIGH = 3

    @property
    def label(self) -> str:
        return self.name.capitalize()

    @classmethod
    def parse(cls, value) -> "ParamsRequired":
        if isinstance(value, cls):
            return value
        if isinstance(value, int):
            return cls(value)
        return cls[str(value).upper()]


def js_frame(js_ch_db: float, re_fraction: float) -> float:
    if re_fraction <= 0.0:
        raise ZeroFraction("an attack on zero REs has no frame-level J/S")
    if re_fraction > 1.0:
        raise ValueError(f"RE fraction {re_fraction} exceeds 1")
    return js_ch_db + 10.0 * math.log10(re_fraction)


def jamming_gain(re_fraction: float) -> float:
    """Power saved relative to barrage jamming, in dB."""
    if re_fraction <= 0.0:
        raise ZeroFraction("an attack on zero REs has no jamming gain")
    if re_fraction > 1.0:
        raise ValueError(f"RE fraction {re_fraction} exceeds 1")
    return -10.0 * math.log10(re_fraction)


def complexity_score(sync_required: bool, params: ParamsRequired | str) -> int:
    """Ordinal attacker complexity: 1 for synchronization plus 0..3 for parameter knowledge."""
    return int(bool(sync_required)) + int(ParamsRequired.parse(params))


def link_budget(
    tx_power_dbm: float,
    antenna_gains_db: float,
    path_loss_exponent: float,
    reference_loss_db: float,
    distance_m: float,
    reference_distance_m: float = 1.0,
) -> float:
    """Received power (dBm) under the log-distance path-loss model."""
    if distance_m <= 0:
        raise NonPositiveDistance(f"distance must be positive, got {distance_m}")
    loss = reference_loss_db + 10.0 * path_loss_exponent * math.log10(distance_m / reference_distance_m)
    return tx_power_dbm + antenna_gains_db - loss


def received_js_db(jammer_rx_dbm: float, signal_rx_dbm: float) -> float:
    return jammer_rx_dbm - signal_rx_dbm


def round_db(x: float) -> int:
    """Nearest integer, ties away from zero."""
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


# ---------------------------------------------------------------------------
# Attack table


@dataclass(frozen=True)
class AttackSpec:
    name: str
    direction: Direction
    modulation: str
    coding: str
    js_ch_db: float
    sync_required: bool
    params_required: ParamsRequired
    # labels whose REs the attack covers
    kinds: tuple[ChannelKind, ...] = ()
    # REs per 10 ms frame; replaces the grid count when set
    occupancy_override: float | None = None
    note: str = ""


@dataclass(frozen=True)
class AttackOccupancy:
    attack: str
    re_count: float
    res_per_frame: int
    note: str

    @property
    def fraction(self) -> float:
        return self.re_count / self.res_per_frame


@dataclass(frozen=True)
class ThreatEntry:
    channel: str
    modulation: str
    coding: str
    re_fraction: float
    sync_required: bool
    params_required: ParamsRequired
    js_ch_db: float
    js_frame_db: float
    complexity_score: int
    occupancy: AttackOccupancy = field(repr=False)


def spoofing_re_count(n_fake_pss: int = 3, period_ms: float = 20.0) -> float:
    """PSS REs per 10 ms frame for ``n_fake_pss`` fake PSS every ``period_ms``."""
    return n_fake_pss * SEQ_LEN * (10.0 / period_ms)


QAM = "{4, 16, 64, 256}-QAM"
_DL, _UL = Direction.DOWNLINK, Direction.UPLINK
_P = ParamsRequired

DEFAULT_ATTACKS: tuple[AttackSpec, ...] = (
    AttackSpec("PDSCH (Downlink)", _DL, QAM, "LDPC", 0.0, False, _P.NONE, (ChannelKind.PDSCH,)),
    AttackSpec("PBCH", _DL, "QPSK", "Polar", 0.0, True, _P.NONE,
               (ChannelKind.PBCH, ChannelKind.PBCH_DMRS),
               note="PBCH region including its DM-RS"),
    AttackSpec("PDCCH", _DL, "QPSK", "Polar", 0.0, True, _P.MEDIUM, (ChannelKind.PDCCH,)),
    AttackSpec("PUSCH (Uplink)", _UL, QAM, "LDPC", 0.0, False, _P.NONE, (ChannelKind.PUSCH,)),
    AttackSpec("PUCCH", _UL, "QPSK", "Variety", 0.0, True, _P.HIGH, (ChannelKind.PUCCH,)),
    AttackSpec("PRACH", _UL, "Zadoff-Chu Sequence", "N/A", 10.0, True, _P.MEDIUM, (ChannelKind.PRACH,)),
    AttackSpec("PSS (Spoofing)", _DL, "M-Sequences", "N/A", 10.0, False, _P.NONE, (),
               occupancy_override=spoofing_re_count(),
               note="3 fake PSS per 20 ms from the attacker model, not the legitimate grid"),
    AttackSpec("SSS", _DL, "Gold Sequences", "N/A", 10.0, True, _P.NONE, (ChannelKind.SSS,)),
    AttackSpec("PBCH DM-RS", _DL, "QPSK", "N/A", 3.0, True, _P.LOW, (ChannelKind.PBCH_DMRS,)),
)

ATTACKS_BY_NAME = {a.name: a for a in DEFAULT_ATTACKS}


def override_attacks(attacks: Sequence[AttackSpec], overrides: dict[str, dict]) -> tuple[AttackSpec, ...]:
    """Replace fields (e.g. ``js_ch_db``) of named attacks; unknown names raise KeyError."""
    by_name = {a.name: a for a in attacks}
    for name in overrides:
        if name not in by_name:
            raise KeyError(f"unknown attack {name!r}")
    out = []
    for a in attacks:
        changes = dict(overrides.get(a.name, {}))
        if "params_required" in changes:
            changes["params_required"] = ParamsRequired.parse(changes["params_required"])
        out.append(replace(a, **changes) if changes else a)
    return tuple(out)


def attack_occupancy(attack: AttackSpec, grid: ResourceGrid) -> AttackOccupancy:
    res = grid.dims.res_per_frame
    if attack.occupancy_override is not None:
        count = float(attack.occupancy_override)
    else:
        count = float(sum(grid.count(k) for k in attack.kinds))
    if count > res:
        raise ValueError(f"{attack.name}: {count} REs exceed the {res}-RE frame")
    return AttackOccupancy(attack.name, count, res, attack.note)


def assess(
    grid_config: GridConfig | None = None,
    attacks: Iterable[AttackSpec] = DEFAULT_ATTACKS,
) -> list[ThreatEntry]:
    """One entry per attack, with RE fractions from the DL/UL grids of ``grid_config``."""
    base = grid_config or GridConfig()
    if not base.is_baseline:
        log.warning("assessment uses a non-baseline grid (%s MHz, %s kHz, below 3 GHz=%s)",
                    base.bw_mhz, base.scs_khz, base.carrier_below_3ghz)
    grids = {
        d: build_grid(replace(base, direction=d)) for d in (Direction.DOWNLINK, Direction.UPLINK)
    }
    entries = []
    for attack in attacks:
        occ = attack_occupancy(attack, grids[attack.direction])
        frac = occ.fraction
        entries.append(ThreatEntry(
            channel=attack.name,
            modulation=attack.modulation,
            coding=attack.coding,
            re_fraction=frac,
            sync_required=attack.sync_required,
            params_required=attack.params_required,
            js_ch_db=attack.js_ch_db,
            js_frame_db=js_frame(attack.js_ch_db, frac),
            complexity_score=complexity_score(attack.sync_required, attack.params_required),
            occupancy=occ,
        ))
    return sorted(entries, key=lambda e: e.channel)


@dataclass(frozen=True)
class ScatterPoint:
    attack: str
    efficiency_db: float
    complexity: int


def ranking_scatter(entries: Sequence[ThreatEntry]) -> list[ScatterPoint]:
    """Efficiency (-J/S_F, higher is cheaper for the attacker) against complexity."""
    if not entries:
        raise ValueError("no threat entries to rank")
    return [ScatterPoint(e.channel, -e.js_frame_db, e.complexity_score) for e in entries]


# ---------------------------------------------------------------------------
# Export

TABLE_COLUMNS = (
    "Channel/Signal", "Modulation", "Coding", "% of REs",
    "Synch. Required", "Params. Required", "J/S_CH", "J/S_F",
)
RAW_COLUMNS = (
    "channel", "modulation", "coding", "re_count", "res_per_frame", "re_fraction",
    "sync_required", "params_required", "js_ch_db", "js_frame_db", "js_frame_db_display",
    "complexity_score", "note",
)


def _yes_no(flag: bool) -> str:
    return "Yes" if flag else "No"


def _fmt(x: float) -> str:
    return repr(float(x))


def table_csv(entries: Sequence[ThreatEntry]) -> str:
    """Display table: percentages to 0.1, J/S rounded to whole dB."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_COLUMNS)
    for e in entries:
        w.writerow([
            e.channel, e.modulation, e.coding, f"{100 * e.re_fraction:.1f}",
            _yes_no(e.sync_required), e.params_required.label,
            round_db(e.js_ch_db), round_db(e.js_frame_db),
        ])
    return buf.getvalue()


def raw_csv(entries: Sequence[ThreatEntry]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RAW_COLUMNS)
    for e in entries:
        w.writerow([
            e.channel, e.modulation, e.coding, _fmt(e.occupancy.re_count), e.occupancy.res_per_frame,
            _fmt(e.re_fraction), _yes_no(e.sync_required), e.params_required.label,
            _fmt(e.js_ch_db), _fmt(e.js_frame_db), round_db(e.js_frame_db),
            e.complexity_score, e.occupancy.note,
        ])
    return buf.getvalue()


def scatter_csv(points: Sequence[ScatterPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("attack", "efficiency_db", "complexity_score"))
    for p in points:
        w.writerow([p.attack, _fmt(p.efficiency_db), p.complexity])
    return buf.getvalue()
