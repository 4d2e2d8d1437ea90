"""AWGN plus Gaussian jamming on the targeted resource elements."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigConflict
from ..grid import ChannelKind


class JammerKind(str, enum.Enum):
    BARRAGE = "barrage"
    CHANNEL_SELECTIVE = "channel_selective"
    SPOOFING = "spoofing"


@dataclass(frozen=True)
class JammerSpec:
    kind: JammerKind = JammerKind.CHANNEL_SELECTIVE
    # jammer power over the targeted REs relative to signal power; -inf disables
    j_s_ch_db: float = -math.inf
    target: ChannelKind = ChannelKind.PBCH
    duty_cycle: float = 1.0
    synchronized: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", JammerKind(self.kind))
        object.__setattr__(self, "target", ChannelKind[self.target] if isinstance(self.target, str) else ChannelKind(self.target))
        if not 0.0 < self.duty_cycle <= 1.0:
            raise ConfigConflict(f"duty_cycle must be in (0, 1], got {self.duty_cycle}")
        if self.kind is JammerKind.BARRAGE and self.duty_cycle != 1.0:
            raise ConfigConflict("barrage jamming runs at 100% duty cycle")
        if self.kind is JammerKind.SPOOFING and self.target is not ChannelKind.PSS:
            raise ConfigConflict("spoofing only targets the PSS")

    @classmethod
    def off(cls) -> "JammerSpec":
        return cls()

    @property
    def is_noise(self) -> bool:
        """Whether this jammer adds noise; spoofing injects fake signals instead."""
        return self.kind is not JammerKind.SPOOFING and self.j_s_ch_db > -math.inf

    @property
    def power(self) -> float:
        return 10.0 ** (self.j_s_ch_db / 10.0) if self.is_noise else 0.0

    def with_js(self, j_s_ch_db: float) -> "JammerSpec":
        return JammerSpec(self.kind, j_s_ch_db, self.target, self.duty_cycle, self.synchronized)


def complex_gaussian(rng: np.random.Generator, shape, power: float) -> np.ndarray:
    scale = math.sqrt(power / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def jam_mask(shape, jammer: JammerSpec, rng: np.random.Generator) -> np.ndarray:
    """Which of the targeted symbols the jammer hits.

    Barrage hits everything.  A channel-selective jammer with duty cycle d
    hits each symbol independently with probability d.
    """
    if not jammer.is_noise:
        return np.zeros(shape, dtype=bool)
    if jammer.duty_cycle >= 1.0:
        return np.ones(shape, dtype=bool)
    return rng.random(shape) < jammer.duty_cycle


def awgn_and_jam(
    symbols,
    snr_db: float,
    jammer: JammerSpec,
    rng: np.random.Generator,
    target_mask: np.ndarray | None = None,
) -> np.ndarray:
    """Add unit-signal-referenced noise at ``snr_db`` and jamming on targeted symbols.

    ``target_mask`` marks the REs that belong to the jammed channel (all of
    them when omitted).  Within that set the duty cycle selects the jammed
    symbols; REs outside it never see the jammer.
    """
    x = np.asarray(symbols, dtype=complex)
    noise_var = 10.0 ** (-snr_db / 10.0)
    y = x + complex_gaussian(rng, x.shape, noise_var)
    if jammer.is_noise:
        hit = jam_mask(x.shape, jammer, rng)
        if target_mask is not None:
            hit &= np.broadcast_to(target_mask, x.shape)
        jam = complex_gaussian(rng, x.shape, jammer.power)
        y = y + np.where(hit, jam, 0.0)
    return y


def effective_sinr_db(snr_db: float, jammer: JammerSpec) -> float:
    """Signal over noise plus duty-weighted jammer power, unit signal power."""
    interference = 10.0 ** (-snr_db / 10.0) + jammer.duty_cycle * jammer.power
    return -10.0 * math.log10(interference)
