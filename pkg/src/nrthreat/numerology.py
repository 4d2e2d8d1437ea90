"""Sub-6 GHz NR numerology: subcarrier spacings, slot counts and RB tables."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import UnknownSpacing, UnsupportedCombination

SUBCARRIERS_PER_RB = 12
SYMBOLS_PER_SLOT = 14
SUBFRAMES_PER_FRAME = 10
FRAME_MS = 10.0


class BandClass(str, enum.Enum):
    SUB6 = "sub6"
    MMWAVE = "mmwave"


@dataclass(frozen=True)
class Numerology:
    scs_khz: int
    slots_per_subframe: int
    band_class: BandClass
    min_bw_mhz: float
    max_bw_mhz: float

    @property
    def slots_per_frame(self) -> int:
        return SUBFRAMES_PER_FRAME * self.slots_per_subframe

    @property
    def slot_ms(self) -> float:
        return 1.0 / self.slots_per_subframe


# scs_khz -> (slots/subframe, band, min BW MHz, max BW MHz)
_NUMEROLOGY_TABLE: dict[int, tuple[int, BandClass, float, float]] = {
    15: (1, BandClass.SUB6, 4.32, 49.5),
    30: (2, BandClass.SUB6, 8.64, 99.0),
    60: (4, BandClass.SUB6, 17.28, 198.0),
    120: (8, BandClass.MMWAVE, 34.56, 396.0),
    240: (16, BandClass.MMWAVE, 69.12, 397.44),
}

# Channel bandwidth (MHz) -> RB count, per sub-6 spacing. Missing keys are blank cells.
_RB_TABLE: dict[int, dict[int, int]] = {
    15: {5: 25, 10: 52, 15: 79, 20: 106, 25: 133, 30: 160, 40: 216, 50: 270},
    30: {5: 11, 10: 24, 15: 38, 20: 51, 25: 65, 30: 78, 40: 106, 50: 133,
         60: 162, 70: 189, 80: 217, 90: 245, 100: 273},
    60: {10: 11, 15: 18, 20: 24, 25: 31, 30: 38, 40: 51, 50: 65,
         60: 79, 70: 93, 80: 107, 90: 121, 100: 135},
}

SPACINGS_KHZ: tuple[int, ...] = tuple(_NUMEROLOGY_TABLE)
SUB6_SPACINGS_KHZ: tuple[int, ...] = tuple(_RB_TABLE)


def numerology_for(scs_khz: int) -> Numerology:
    try:
        slots, band, lo, hi = _NUMEROLOGY_TABLE[scs_khz]
    except (KeyError, TypeError):
        raise UnknownSpacing(f"no NR numerology with {scs_khz!r} kHz subcarrier spacing") from None
    return Numerology(scs_khz, slots, band, lo, hi)


def table_cells() -> list[tuple[int, int]]:
    """All populated (bandwidth MHz, spacing kHz) cells of the RB table."""
    return [(bw, scs) for scs, row in _RB_TABLE.items() for bw in row]


def rb_count(bw_mhz: float, scs_khz: int) -> int:
    numerology_for(scs_khz)
    row = _RB_TABLE.get(scs_khz)
    if row is None:
        raise UnsupportedCombination(f"no RB table for {scs_khz} kHz (sub-6 GHz spacings only)")
    key = int(round(bw_mhz))
    if abs(bw_mhz - key) > 1e-9 or key not in row:
        raise UnsupportedCombination(f"{bw_mhz} MHz is not a populated cell for {scs_khz} kHz")
    return row[key]


@dataclass(frozen=True)
class GridDimensions:
    subcarriers: int
    symbols_per_frame: int
    slots_per_frame: int
    res_per_frame: int

    @property
    def rb_count(self) -> int:
        return self.subcarriers // SUBCARRIERS_PER_RB


def grid_dimensions(bw_mhz: float, scs_khz: int) -> GridDimensions:
    """Resource-grid size of one 10 ms frame for a sub-6 GHz carrier."""
    num = numerology_for(scs_khz)
    n_rb = rb_count(bw_mhz, scs_khz)
    subcarriers = SUBCARRIERS_PER_RB * n_rb
    slots = num.slots_per_frame
    symbols = SYMBOLS_PER_SLOT * slots
    return GridDimensions(subcarriers, symbols, slots, subcarriers * symbols)
