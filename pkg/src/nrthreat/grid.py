"""Per-RE channel occupancy of one 10 ms FDD frame.

The synchronization block is modeled with the RE accounting used for the
threat analysis rather than the exact standard layout: every block spans
240 subcarriers and five consecutive symbols, ordered
``PSS, PBCH, SSS, PBCH, PBCH``.  PSS and SSS take the middle 127 subcarriers
of their symbol and the remaining 113 are left empty.  Four blocks below
3 GHz therefore give a PBCH region of 240 subcarriers x 12 symbols, and
eight blocks above 3 GHz give 24 symbols.  Blocks start at symbols 3 and 8
of the first two (or four) slots, which keeps them clear of a CORESET of up
to three symbols.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import ConfigConflict
from .numerology import (
    SUBCARRIERS_PER_RB,
    SYMBOLS_PER_SLOT,
    GridDimensions,
    grid_dimensions,
)


class ChannelKind(enum.IntEnum):
    PSS = 0
    SSS = 1
    PBCH = 2
    PBCH_DMRS = 3
    PDCCH = 4
    PDSCH = 5
    PUCCH = 6
    PRACH = 7
    PUSCH = 8
    UNUSED = 9


class Direction(str, enum.Enum):
    DOWNLINK = "downlink"
    UPLINK = "uplink"


DOWNLINK_KINDS = frozenset({
    ChannelKind.PSS, ChannelKind.SSS, ChannelKind.PBCH, ChannelKind.PBCH_DMRS,
    ChannelKind.PDCCH, ChannelKind.PDSCH, ChannelKind.UNUSED,
})
UPLINK_KINDS = frozenset({
    ChannelKind.PUCCH, ChannelKind.PRACH, ChannelKind.PUSCH, ChannelKind.UNUSED,
})

SYNC_SEQUENCE_LENGTH = 127
SSB_SUBCARRIERS = 240
# offset of the 127 PSS/SSS subcarriers inside the 240-wide block
SYNC_SUBCARRIER_OFFSET = 56
SSB_SYMBOL_PATTERN = (
    ChannelKind.PSS, ChannelKind.PBCH, ChannelKind.SSS, ChannelKind.PBCH, ChannelKind.PBCH,
)
SSB_START_SYMBOLS = (3, 8)
PBCH_DMRS_SPACING = 4


@dataclass(frozen=True)
class GridConfig:
    bw_mhz: float = 20.0
    scs_khz: int = 30
    carrier_below_3ghz: bool = True
    direction: Direction = Direction.DOWNLINK
    coreset_time_dur: int = 1
    # None means full band
    coreset_subcarrier_span: int | None = None
    coreset_start_subcarrier: int = 0
    # None means 4 blocks below 3 GHz, 8 above
    ssb_blocks_per_frame: int | None = None
    # shift of the SSB away from band center, in subcarriers
    ssb_offset_subcarriers: int = 0
    pbch_dmrs_shift: int = 0
    pucch_fraction: float = 0.10
    prach_fraction: float = 0.02
    # None places PRACH directly above the lower PUCCH edge
    prach_start_rb: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "direction", Direction(self.direction))
        if self.coreset_time_dur not in (1, 2, 3):
            raise ConfigConflict(f"coreset_time_dur must be 1, 2 or 3, got {self.coreset_time_dur}")
        for name in ("pucch_fraction", "prach_fraction"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigConflict(f"{name} must lie in [0, 1], got {value}")
        if not 0 <= self.pbch_dmrs_shift < PBCH_DMRS_SPACING:
            raise ConfigConflict("pbch_dmrs_shift must be in 0..3")
        if self.ssb_blocks_per_frame is not None and self.ssb_blocks_per_frame < 0:
            raise ConfigConflict("ssb_blocks_per_frame must be non-negative")

    @property
    def ssb_slots(self) -> int:
        return 2 if self.carrier_below_3ghz else 4

    @property
    def ssb_blocks(self) -> int:
        if self.ssb_blocks_per_frame is not None:
            return self.ssb_blocks_per_frame
        return 4 if self.carrier_below_3ghz else 8

    @property
    def is_baseline(self) -> bool:
        """True for 20 MHz, 30 kHz, below 3 GHz; the assessment baseline."""
        return (self.bw_mhz == 20.0 and self.scs_khz == 30 and self.carrier_below_3ghz)


@dataclass(frozen=True)
class ResourceGrid:
    config: GridConfig
    dims: GridDimensions
    # ChannelKind codes indexed (subcarrier, symbol); read-only
    labels: np.ndarray = field(repr=False)

    def count(self, kind: ChannelKind) -> int:
        return int(np.count_nonzero(self.labels == kind))


def _new_labels(dims: GridDimensions, fill: ChannelKind) -> np.ndarray:
    return np.full((dims.subcarriers, dims.symbols_per_frame), int(fill), dtype=np.uint8)


def _freeze(config: GridConfig, dims: GridDimensions, labels: np.ndarray) -> ResourceGrid:
    labels.setflags(write=False)
    return ResourceGrid(config, dims, labels)


def ssb_symbol_starts(config: GridConfig) -> list[int]:
    """First frame symbol of every SSB occurrence."""
    n_blocks = config.ssb_blocks
    capacity = config.ssb_slots * len(SSB_START_SYMBOLS)
    if n_blocks > capacity:
        raise ConfigConflict(
            f"{n_blocks} SSBs do not fit in the first {config.ssb_slots} slots (max {capacity})"
        )
    return [
        (b // len(SSB_START_SYMBOLS)) * SYMBOLS_PER_SLOT + SSB_START_SYMBOLS[b % len(SSB_START_SYMBOLS)]
        for b in range(n_blocks)
    ]


def ssb_first_subcarrier(config: GridConfig, dims: GridDimensions) -> int:
    start = (dims.subcarriers - SSB_SUBCARRIERS) // 2 + config.ssb_offset_subcarriers
    if start < 0 or start + SSB_SUBCARRIERS > dims.subcarriers:
        raise ConfigConflict(
            f"SSB ({SSB_SUBCARRIERS} subcarriers at {start}) does not fit in "
            f"{dims.subcarriers} subcarriers"
        )
    return start


def build_downlink_grid(config: GridConfig) -> ResourceGrid:
    if config.direction is not Direction.DOWNLINK:
        raise ConfigConflict("build_downlink_grid needs a downlink config")
    dims = grid_dimensions(config.bw_mhz, config.scs_khz)
    labels = _new_labels(dims, ChannelKind.PDSCH)

    span = dims.subcarriers if config.coreset_subcarrier_span is None else config.coreset_subcarrier_span
    lo = config.coreset_start_subcarrier
    if span < 0 or lo < 0 or lo + span > dims.subcarriers:
        raise ConfigConflict(f"CORESET [{lo}, {lo + span}) exceeds {dims.subcarriers} subcarriers")
    for slot in range(dims.slots_per_frame):
        first = slot * SYMBOLS_PER_SLOT
        labels[lo:lo + span, first:first + config.coreset_time_dur] = ChannelKind.PDCCH

    starts = ssb_symbol_starts(config)
    if starts:
        k0 = ssb_first_subcarrier(config, dims)
        block = slice(k0, k0 + SSB_SUBCARRIERS)
        sync = slice(k0 + SYNC_SUBCARRIER_OFFSET, k0 + SYNC_SUBCARRIER_OFFSET + SYNC_SEQUENCE_LENGTH)
        dmrs = np.arange(k0 + config.pbch_dmrs_shift, k0 + SSB_SUBCARRIERS, PBCH_DMRS_SPACING)
        for s0 in starts:
            for i, kind in enumerate(SSB_SYMBOL_PATTERN):
                sym = s0 + i
                if kind is ChannelKind.PBCH:
                    labels[block, sym] = ChannelKind.PBCH
                    labels[dmrs, sym] = ChannelKind.PBCH_DMRS
                else:
                    labels[block, sym] = ChannelKind.UNUSED
                    labels[sync, sym] = kind
    return _freeze(config, dims, labels)


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def build_uplink_grid(config: GridConfig) -> ResourceGrid:
    """Uplink frame: PUCCH on both band edges, one PRACH RB window, PUSCH elsewhere.

    Allocations are whole RBs over the whole frame, so each fraction is met to
    within half an RB column.
    """
    if config.direction is not Direction.UPLINK:
        raise ConfigConflict("build_uplink_grid needs an uplink config")
    if config.pucch_fraction + config.prach_fraction > 1.0:
        raise ConfigConflict("pucch_fraction + prach_fraction exceeds 1")
    dims = grid_dimensions(config.bw_mhz, config.scs_khz)
    n_rb = dims.rb_count
    labels = _new_labels(dims, ChannelKind.PUSCH)

    n_pucch = _round_half_up(config.pucch_fraction * n_rb)
    n_prach = _round_half_up(config.prach_fraction * n_rb)
    low_pucch = (n_pucch + 1) // 2
    high_pucch = n_pucch - low_pucch
    prach_start = low_pucch if config.prach_start_rb is None else config.prach_start_rb
    if n_pucch + n_prach > n_rb:
        raise ConfigConflict("PUCCH and PRACH allocations exceed the carrier")
    if n_prach and (prach_start < low_pucch or prach_start + n_prach > n_rb - high_pucch):
        raise ConfigConflict(f"PRACH window at RB {prach_start} overlaps PUCCH or leaves the band")

    sc = SUBCARRIERS_PER_RB
    labels[: low_pucch * sc, :] = ChannelKind.PUCCH
    if high_pucch:
        labels[-high_pucch * sc:, :] = ChannelKind.PUCCH
    labels[prach_start * sc:(prach_start + n_prach) * sc, :] = ChannelKind.PRACH
    return _freeze(config, dims, labels)


def build_grid(config: GridConfig) -> ResourceGrid:
    if config.direction is Direction.DOWNLINK:
        return build_downlink_grid(config)
    return build_uplink_grid(config)


def re_counts(grid: ResourceGrid) -> dict[ChannelKind, int]:
    codes = np.bincount(grid.labels.ravel(), minlength=len(ChannelKind))
    return {kind: int(codes[kind]) for kind in ChannelKind}


def re_fraction_exact(grid: ResourceGrid, kind: ChannelKind) -> Fraction:
    return Fraction(grid.count(kind), grid.dims.res_per_frame)


def re_fraction(grid: ResourceGrid, kind: ChannelKind) -> float:
    return float(re_fraction_exact(grid, kind))


def region_fraction(grid: ResourceGrid, kinds: Iterable[ChannelKind]) -> float:
    """Fraction of REs carrying any of ``kinds``; e.g. PBCH together with its DM-RS."""
    kinds = set(kinds)
    return float(sum((re_fraction_exact(grid, k) for k in kinds), Fraction(0)))


def pdcch_time_duty_cycle(grid: ResourceGrid) -> float:
    """Fraction of frame symbols that carry any PDCCH RE."""
    has_pdcch = np.any(grid.labels == ChannelKind.PDCCH, axis=0)
    return float(np.count_nonzero(has_pdcch)) / grid.dims.symbols_per_frame


# ---------------------------------------------------------------------------
# Export


@dataclass(frozen=True)
class OccupancyMap:
    """Label codes as a (symbol, subcarrier) matrix plus the code legend."""

    codes: np.ndarray
    legend: dict[int, str]

    @property
    def shape(self) -> tuple[int, int]:
        return self.codes.shape

    def names(self) -> np.ndarray:
        lookup = np.array([self.legend[i] for i in range(len(self.legend))], dtype=object)
        return lookup[self.codes]


LEGEND = {int(k): k.name for k in ChannelKind}


def occupancy_map(grid: ResourceGrid) -> OccupancyMap:
    return OccupancyMap(np.ascontiguousarray(grid.labels.T), dict(LEGEND))


def to_csv(occ: OccupancyMap) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    n_sym, n_sc = occ.shape
    writer.writerow(["symbol", *range(n_sc)])
    names = occ.names()
    for sym in range(n_sym):
        writer.writerow([sym, *names[sym]])
    return buf.getvalue()


def from_csv(text: str) -> OccupancyMap:
    rows = list(csv.reader(io.StringIO(text)))
    by_name = {name: code for code, name in LEGEND.items()}
    codes = np.array([[by_name[c] for c in row[1:]] for row in rows[1:]], dtype=np.uint8)
    return OccupancyMap(codes, dict(LEGEND))


def _run_lengths(flat: np.ndarray) -> list[list[int]]:
    if flat.size == 0:
        return []
    edges = np.flatnonzero(np.diff(flat)) + 1
    starts = np.concatenate(([0], edges))
    lengths = np.diff(np.concatenate((starts, [flat.size])))
    return [[int(flat[s]), int(n)] for s, n in zip(starts, lengths)]


def to_json(occ: OccupancyMap, dims: GridDimensions | None = None) -> str:
    n_sym, n_sc = occ.shape
    doc = {
        "shape": {"symbols": n_sym, "subcarriers": n_sc},
        "order": "row-major (symbol, subcarrier)",
        "legend": {str(k): v for k, v in occ.legend.items()},
        "rle": _run_lengths(occ.codes.ravel()),
    }
    if dims is not None:
        doc["dims"] = {
            "subcarriers": dims.subcarriers,
            "symbols_per_frame": dims.symbols_per_frame,
            "slots_per_frame": dims.slots_per_frame,
            "res_per_frame": dims.res_per_frame,
        }
    return json.dumps(doc, separators=(",", ":"))


def from_json(text: str) -> OccupancyMap:
    doc = json.loads(text)
    shape = (doc["shape"]["symbols"], doc["shape"]["subcarriers"])
    flat = np.concatenate(
        [np.full(n, code, dtype=np.uint8) for code, n in doc["rle"]]
    ) if doc["rle"] else np.zeros(0, dtype=np.uint8)
    legend = {int(k): v for k, v in doc["legend"].items()}
    return OccupancyMap(flat.reshape(shape), legend)
