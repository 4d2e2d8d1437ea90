"""Initial cell search under PSS/SSS spoofing, with and without the blacklist defense.

The UE model is deliberately simple.  Each iteration it measures every
visible PSS (true power plus Gaussian measurement error), takes the
strongest candidate and tries to finish acquisition:

* no valid SSS: the SSS timer runs out,
* valid SSS but undecodable MIB: the MIB timer runs out,
* otherwise the UE camps.

Without mitigation the UE simply tries the strongest PSS again.  With
mitigation a candidate that times out is blacklisted for ``decay_ms`` and
the next strongest is tried.  Candidates are identified by
``(n_id_2, timing bucket)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import ClockRegression, ConfigConflict, EmptyEnvironment
from .numerology import FRAME_MS
from .stats import SimResult, proportion, trial_rng

# 30 kHz SCS at 30.72 Msps
SAMPLES_PER_SLOT = 15_360
SLOTS_PER_FRAME = 20
SAMPLES_PER_FRAME = SAMPLES_PER_SLOT * SLOTS_PER_FRAME
# the real SSB burst sits in the first two slots
SSB_WINDOW_SAMPLES = 2 * SAMPLES_PER_SLOT


@dataclass(frozen=True)
class CellBeacon:
    n_id_2: int
    rx_power_db: float
    timing_offset: int = 0
    has_valid_sss: bool = True
    mib_decodable: bool = True
    legitimate: bool = True
    n_id_1: int | None = None


@dataclass(frozen=True)
class AttackerModel:
    n_fake_pss: int = 3
    # fake PSS power relative to the strongest legitimate cell
    power_offset_db: float = 6.0
    rotate_each_frame: bool = False
    # burst period of the fakes; sets their RE occupancy, not the search timing
    period_ms: float = 20.0
    # fakes carry a valid SSS, so they fail on the MIB timer instead
    spoof_sss: bool = False

    def __post_init__(self) -> None:
        if self.n_fake_pss < 0:
            raise ConfigConflict("n_fake_pss must be >= 0")
        if self.period_ms <= 0:
            raise ConfigConflict("period_ms must be positive")

    @classmethod
    def absent(cls) -> "AttackerModel":
        return cls(n_fake_pss=0)


@dataclass(frozen=True)
class SearchConfig:
    sss_timer_ms: float = 20.0
    mib_timer_ms: float = 80.0
    max_iterations: int = 50
    mitigation_enabled: bool = True
    decay_ms: float = 1000.0
    timing_bucket_samples: int = SAMPLES_PER_SLOT
    noise_floor_db: float = -20.0
    measurement_noise_db: float = 1.0

    def __post_init__(self) -> None:
        if self.sss_timer_ms <= 0 or self.mib_timer_ms <= 0:
            raise ConfigConflict("timers must be positive")
        if self.decay_ms <= 0:
            raise ConfigConflict("decay_ms must be positive")
        if self.max_iterations < 1:
            raise ConfigConflict("max_iterations must be >= 1")
        if self.timing_bucket_samples < 1:
            raise ConfigConflict("timing_bucket_samples must be >= 1")


# ---------------------------------------------------------------------------
# Blacklist


@dataclass(frozen=True)
class Failure:
    key: Hashable
    at_ms: float


@dataclass(frozen=True)
class Advance:
    to_ms: float


@dataclass(frozen=True)
class BlacklistState:
    """Unbounded blacklist; ``entries`` maps candidate identity to expiry time."""

    decay_ms: float
    now_ms: float = 0.0
    entries: Mapping[Hashable, float] = field(default_factory=lambda: MappingProxyType({}))

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, key: Hashable) -> bool:
        return key in self.entries


def blacklist_step(state: BlacklistState, event: Failure | Advance) -> BlacklistState:
    """Apply one event; expired entries (expiry <= now) are purged on every step."""
    now = event.at_ms if isinstance(event, Failure) else event.to_ms
    if now < state.now_ms:
        raise ClockRegression(f"clock moved back from {state.now_ms} to {now} ms")
    entries = {k: t for k, t in state.entries.items() if t > now}
    if isinstance(event, Failure):
        entries[event.key] = now + state.decay_ms
    return BlacklistState(state.decay_ms, now, MappingProxyType(entries))


def is_blacklisted(state: BlacklistState, key: Hashable, now_ms: float) -> bool:
    return key in blacklist_step(state, Advance(now_ms))


# ---------------------------------------------------------------------------
# Cell search


@dataclass(frozen=True)
class SearchOutcome:
    camped: CellBeacon | None
    dos: bool
    iterations: int
    blacklist_size: int
    peak_blacklist_size: int
    elapsed_ms: float
    blacklist_trace: tuple[tuple[float, int], ...] = ()


def candidate_key(beacon: CellBeacon, bucket_samples: int) -> tuple[int, int]:
    return beacon.n_id_2, beacon.timing_offset // bucket_samples


def fake_beacons(
    attacker: AttackerModel,
    reference_power_db: float,
    rng: np.random.Generator,
    power_jitter_db: float = 0.0,
) -> list[CellBeacon]:
    """Fake PSS transmissions at random sequences and timings outside the real SSB window."""
    fakes = []
    for _ in range(attacker.n_fake_pss):
        offset = int(rng.integers(SSB_WINDOW_SAMPLES, SAMPLES_PER_FRAME))
        power = reference_power_db + attacker.power_offset_db + power_jitter_db * rng.standard_normal()
        fakes.append(CellBeacon(
            n_id_2=int(rng.integers(3)),
            rx_power_db=float(power),
            timing_offset=offset,
            has_valid_sss=attacker.spoof_sss,
            mib_decodable=False,
            legitimate=False,
        ))
    return fakes


def cell_search(
    environment: Sequence[CellBeacon],
    attacker: AttackerModel,
    config: SearchConfig,
    seed: int = 0,
    fake_power_jitter_db: float = 0.0,
    trace: bool = False,
    stop_after_ms: float | None = None,
) -> SearchOutcome:
    """Run one UE's initial cell search against the beacons plus the attacker's fakes.

    Fake power is referenced to the strongest legitimate beacon (0 dB when
    there is none).  A rotating attacker redraws its fakes every 10 ms frame.
    ``stop_after_ms`` ends the search (as DoS) once simulated time reaches it.
    """
    if not environment and attacker.n_fake_pss == 0:
        raise EmptyEnvironment("nothing to search: no beacons and no attacker")
    rng = np.random.default_rng([int(seed), 0x5EA])
    legit = [b for b in environment if b.legitimate]
    reference = max((b.rx_power_db for b in legit), default=0.0)
    fixed = list(environment)

    epochs: dict[int, list[CellBeacon]] = {}

    def fakes_at(now_ms: float) -> list[CellBeacon]:
        epoch = int(now_ms // FRAME_MS) if attacker.rotate_each_frame else 0
        if epoch not in epochs:
            epochs[epoch] = fake_beacons(
                attacker, reference, np.random.default_rng([int(seed), 0xFA4E, epoch]),
                fake_power_jitter_db,
            )
        return epochs[epoch]

    blacklist = BlacklistState(config.decay_ms)
    now = 0.0
    peak = 0
    sizes = []
    iteration = 0
    for iteration in range(1, config.max_iterations + 1):
        if stop_after_ms is not None and now >= stop_after_ms:
            iteration -= 1
            break
        visible = [b for b in fixed + fakes_at(now) if b.rx_power_db >= config.noise_floor_db]
        measured = [b.rx_power_db + config.measurement_noise_db * rng.standard_normal() for b in visible]
        order = sorted(range(len(visible)), key=lambda i: -measured[i])
        if config.mitigation_enabled:
            blacklist = blacklist_step(blacklist, Advance(now))
            order = [i for i in order
                     if candidate_key(visible[i], config.timing_bucket_samples) not in blacklist]
        if not order:
            # everything visible is blacklisted or below the floor: rescan next frame
            now += FRAME_MS
            continue
        pick = visible[order[0]]
        if pick.has_valid_sss and pick.mib_decodable:
            return SearchOutcome(pick, not pick.legitimate, iteration, len(blacklist), peak,
                                 now, tuple(sizes))
        now += config.sss_timer_ms if not pick.has_valid_sss else config.mib_timer_ms
        if config.mitigation_enabled:
            blacklist = blacklist_step(
                blacklist, Failure(candidate_key(pick, config.timing_bucket_samples), now))
            peak = max(peak, len(blacklist))
            if trace:
                sizes.append((now, len(blacklist)))
    return SearchOutcome(None, True, iteration, len(blacklist), peak, now, tuple(sizes))


@dataclass(frozen=True)
class ScenarioRandomization:
    """Per-trial draws: legitimate power uniform in ``legit_power_window_db``,
    fake power = legit + offset + N(0, ``fake_power_jitter_db``)."""

    legit_power_window_db: tuple[float, float] = (-3.0, 3.0)
    fake_power_jitter_db: float = 2.0
    n_legit_cells: int = 1

    def draw(self, rng: np.random.Generator) -> list[CellBeacon]:
        lo, hi = self.legit_power_window_db
        return [
            CellBeacon(
                n_id_2=int(rng.integers(3)),
                n_id_1=int(rng.integers(336)),
                rx_power_db=float(rng.uniform(lo, hi)),
                timing_offset=int(rng.integers(0, SSB_WINDOW_SAMPLES)),
            )
            for _ in range(self.n_legit_cells)
        ]


_STREAM_DEFENSE = 7


def simulate_dos_probability(
    attacker: AttackerModel,
    config: SearchConfig,
    randomization: ScenarioRandomization | None = None,
    trials: int = 1000,
    seed: int = 0,
    environment: Sequence[CellBeacon] | None = None,
) -> SimResult:
    """Fraction of searches that end without camping on a legitimate cell.

    Legitimate beacons are drawn from ``randomization`` per trial unless a
    fixed ``environment`` is given.
    """
    rand = randomization or ScenarioRandomization()
    dos = 0
    for t in range(trials):
        rng = trial_rng(seed, t, _STREAM_DEFENSE)
        env = list(environment) if environment is not None else rand.draw(rng)
        trial_seed = int(rng.integers(2**31))
        out = cell_search(env, attacker, config, trial_seed, rand.fake_power_jitter_db)
        dos += out.dos
    return proportion(dos, trials, trials, seed)


def paired_dos(
    attacker: AttackerModel,
    config: SearchConfig,
    randomization: ScenarioRandomization | None = None,
    trials: int = 1000,
    seed: int = 0,
    environment: Sequence[CellBeacon] | None = None,
) -> dict[str, SimResult]:
    """Same scenarios with mitigation off and on."""
    return {
        arm: simulate_dos_probability(
            attacker, replace(config, mitigation_enabled=on), randomization, trials, seed, environment)
        for arm, on in (("unmitigated", False), ("mitigated", True))
    }


def blacklist_growth(
    attacker: AttackerModel,
    config: SearchConfig,
    duration_ms: float = 10_000.0,
    seed: int = 0,
) -> SearchOutcome:
    """Run a mitigated search for ``duration_ms`` of simulated time, tracing blacklist size.

    Only the attacker is present, so the UE never camps and keeps failing.
    """
    step = min(FRAME_MS, config.sss_timer_ms, config.mib_timer_ms)
    cfg = replace(config, mitigation_enabled=True,
                  max_iterations=int(math.ceil(duration_ms / step)) + 2)
    return cell_search([], attacker, cfg, seed, trace=True, stop_after_ms=duration_ms)


def steady_state_size(arrival_period_ms: float, decay_ms: float) -> float:
    """Expected blacklist size for one new entry every ``arrival_period_ms``."""
    return decay_ms / arrival_period_ms


def sweep_power_offset(
    offsets_db: Iterable[float],
    attacker: AttackerModel,
    config: SearchConfig,
    randomization: ScenarioRandomization | None = None,
    trials: int = 1000,
    seed: int = 0,
    environment: Sequence[CellBeacon] | None = None,
) -> list[tuple[float, dict[str, SimResult]]]:
    return [
        (off, paired_dos(replace(attacker, power_offset_db=off), config, randomization,
                         trials, seed, environment))
        for off in offsets_db
    ]
