"""Monte-Carlo link simulations and DoS-threshold sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..errors import ConfigConflict, NoThresholdInRange
from ..grid import ChannelKind
from ..sequences import (
    N_ID_1_COUNT,
    SEQ_LEN,
    CellId,
    DetectorCalibration,
    calibrate_pss_threshold,
    gen_pss,
    gen_sss,
    pss_metrics,
)
from ..stats import SimResult, proportion, trial_rng
from .channel import JammerKind, JammerSpec, awgn_and_jam, complex_gaussian
from .modem import qpsk_hard, qpsk_llr, qpsk_modulate
from .polar import PolarCode

DOS_FAILURE_LEVEL = 0.9

# per-simulation RNG streams, so sweeps of different kinds never share draws
_STREAM_BER, _STREAM_BLER, _STREAM_PSS, _STREAM_SSS = 1, 2, 3, 4


@dataclass(frozen=True)
class LinkConfig:
    snr_db: float = 10.0
    modulation: str = "QPSK"
    # polar_n None means uncoded
    polar_n: int | None = 256
    polar_k: int = 85
    design_snr_db: float = 0.0
    trials: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.modulation != "QPSK":
            raise ConfigConflict(f"only QPSK is modeled, got {self.modulation!r}")
        if self.trials < 1:
            raise ConfigConflict("trials must be >= 1")
        if self.polar_n is not None:
            n = self.polar_n
            if n < 2 or n & (n - 1):
                raise ConfigConflict(f"polar_n must be a power of two, got {n}")
            if not 0 <= self.polar_k < n:
                raise ConfigConflict(f"need 0 <= polar_k < polar_n, got {self.polar_k}")
            if n % 2:
                raise ConfigConflict("QPSK needs an even code length")

    def code(self) -> PolarCode:
        if self.polar_n is None:
            raise ConfigConflict("link is uncoded")
        return PolarCode(self.polar_n, self.polar_k, self.design_snr_db)


# ---------------------------------------------------------------------------
# Data links


def simulate_ber(
    ebn0_db: float,
    n_bits: int,
    seed: int = 0,
    bits_per_trial: int = 10_000,
    jammer: JammerSpec | None = None,
) -> SimResult:
    """Uncoded Gray QPSK bit error rate; one trial is ``bits_per_trial`` bits."""
    jammer = jammer or JammerSpec.off()
    snr_db = ebn0_db + 10.0 * math.log10(2.0)
    n_trials = math.ceil(n_bits / bits_per_trial)
    errors = total = 0
    for i in range(n_trials):
        rng = trial_rng(seed, i, _STREAM_BER)
        m = min(bits_per_trial, n_bits - total)
        m -= m % 2
        bits = rng.integers(0, 2, m, dtype=np.int8)
        rx = awgn_and_jam(qpsk_modulate(bits), snr_db, jammer, rng)
        errors += int(np.count_nonzero(qpsk_hard(rx) != bits))
        total += m
    return proportion(errors, total, n_trials, seed)


def simulate_bler(link: LinkConfig, jammer: JammerSpec | None = None) -> SimResult:
    """Block error rate of the polar-coded QPSK control-channel surrogate.

    Every symbol of the codeword lies on the targeted channel, so a
    channel-selective jammer hits it according to its duty cycle.  Trial i
    draws from ``trial_rng(seed, i)``; the same seed at different J/S values
    reuses the same payloads and noise shapes.
    """
    jammer = jammer or JammerSpec.off()
    code = link.code()
    noise_var = 10.0 ** (-link.snr_db / 10.0) + jammer.duty_cycle * jammer.power
    payloads = np.empty((link.trials, code.k), dtype=np.uint8)
    llrs = np.empty((link.trials, code.n))
    for i in range(link.trials):
        rng = trial_rng(link.seed, i, _STREAM_BLER)
        bits = rng.integers(0, 2, code.k, dtype=np.uint8)
        rx = awgn_and_jam(qpsk_modulate(code.encode(bits)), link.snr_db, jammer, rng)
        payloads[i] = bits
        llrs[i] = qpsk_llr(rx, noise_var)
    decoded = code.decode(llrs)
    block_errors = int(np.count_nonzero(np.any(decoded != payloads, axis=-1)))
    return proportion(block_errors, link.trials, link.trials, link.seed)


# ---------------------------------------------------------------------------
# Synchronization signals


PSS_BUFFER = 2 * SEQ_LEN


def simulate_pss_detection(
    j_s_ch_db: float,
    trials: int,
    seed: int = 0,
    snr_db: float = 10.0,
    calibration: DetectorCalibration | None = None,
) -> SimResult:
    """Probability that the true (n_id_2, lag) is the top detector candidate.

    Each trial hides a random PSS at a random circular offset in a
    ``calibration.sample_length`` buffer of unit-power-referenced noise and
    adds Gaussian jamming on the 127 PSS samples only.
    """
    cal = calibration or calibrate_pss_threshold(PSS_BUFFER)
    length = cal.sample_length
    j_power = 10.0 ** (j_s_ch_db / 10.0) if j_s_ch_db > -math.inf else 0.0
    noise_var = 10.0 ** (-snr_db / 10.0)
    buf = np.empty((trials, length), dtype=complex)
    truth = np.empty((trials, 2), dtype=int)
    bank = [gen_pss(i).values for i in range(3)]
    for t in range(trials):
        rng = trial_rng(seed, t, _STREAM_PSS)
        nid = int(rng.integers(3))
        lag = int(rng.integers(length))
        idx = (lag + np.arange(SEQ_LEN)) % length
        r = complex_gaussian(rng, length, noise_var)
        jam = complex_gaussian(rng, SEQ_LEN, 1.0)
        r[idx] += bank[nid] + math.sqrt(j_power) * jam
        buf[t] = r
        truth[t] = nid, lag
    metrics = pss_metrics(buf).reshape(trials, -1)
    best = metrics.argmax(axis=-1)
    peak = metrics[np.arange(trials), best]
    hit = (best == truth[:, 0] * length + truth[:, 1]) & (peak > cal.threshold)
    return proportion(int(np.count_nonzero(hit)), trials, trials, seed)


def _sss_metrics(received: np.ndarray, n_id_2: int) -> np.ndarray:
    bank = np.stack([gen_sss(CellId(n1, n_id_2)).values for n1 in range(N_ID_1_COUNT)])
    corr = np.abs(received @ bank.T)
    energy = np.sqrt(np.sum(np.abs(received) ** 2, axis=-1, keepdims=True) * SEQ_LEN)
    return corr / np.where(energy > 0, energy, 1.0)


def calibrate_sss_threshold(false_alarm: float = 0.01, trials: int = 10_000, seed: int = 0) -> float:
    """Peak-metric threshold over the 336 SSS hypotheses for pure noise."""
    rng = np.random.default_rng(seed)
    noise = complex_gaussian(rng, (trials, SEQ_LEN), 1.0)
    return float(np.quantile(_sss_metrics(noise, 0).max(axis=-1), 1.0 - false_alarm))


def simulate_sss_detection(
    j_s_ch_db: float,
    trials: int,
    seed: int = 0,
    snr_db: float = 10.0,
    threshold: float | None = None,
) -> SimResult:
    """Probability of identifying n_id_1 from the SSS with PSS timing already known."""
    thr = calibrate_sss_threshold() if threshold is None else threshold
    j_power = 10.0 ** (j_s_ch_db / 10.0) if j_s_ch_db > -math.inf else 0.0
    noise_var = 10.0 ** (-snr_db / 10.0)
    n_id_2 = 0
    rx = np.empty((trials, SEQ_LEN), dtype=complex)
    truth = np.empty(trials, dtype=int)
    for t in range(trials):
        rng = trial_rng(seed, t, _STREAM_SSS)
        n1 = int(rng.integers(N_ID_1_COUNT))
        noise = complex_gaussian(rng, SEQ_LEN, noise_var)
        jam = complex_gaussian(rng, SEQ_LEN, 1.0)
        rx[t] = gen_sss(CellId(n1, n_id_2)).values + noise + math.sqrt(j_power) * jam
        truth[t] = n1
    metrics = _sss_metrics(rx, n_id_2)
    best = metrics.argmax(axis=-1)
    hit = (best == truth) & (metrics[np.arange(trials), best] > thr)
    return proportion(int(np.count_nonzero(hit)), trials, trials, seed)


# ---------------------------------------------------------------------------
# Sweeps and thresholds


@dataclass(frozen=True)
class SweepPoint:
    j_s_ch_db: float
    result: SimResult
    failure: float


def _failure_fn(channel: ChannelKind, link: LinkConfig) -> Callable[[float], tuple[SimResult, float]]:
    if channel in (ChannelKind.PBCH, ChannelKind.PDCCH):
        base = JammerSpec(JammerKind.CHANNEL_SELECTIVE, target=channel)

        def bler(js: float) -> tuple[SimResult, float]:
            res = simulate_bler(link, base.with_js(js))
            return res, res.point_estimate

        return bler
    if channel is ChannelKind.PSS:
        cal = calibrate_pss_threshold(PSS_BUFFER, seed=link.seed)

        def pss(js: float) -> tuple[SimResult, float]:
            res = simulate_pss_detection(js, link.trials, link.seed, link.snr_db, cal)
            return res, 1.0 - res.point_estimate

        return pss
    if channel is ChannelKind.SSS:
        thr = calibrate_sss_threshold(seed=link.seed)

        def sss(js: float) -> tuple[SimResult, float]:
            res = simulate_sss_detection(js, link.trials, link.seed, link.snr_db, thr)
            return res, 1.0 - res.point_estimate

        return sss
    raise ConfigConflict(f"no link model for {channel.name}; use PBCH, PDCCH, PSS or SSS")


def sweep_range(lo_db: float, hi_db: float, step_db: float = 1.0) -> list[float]:
    n = int(math.floor((hi_db - lo_db) / step_db + 1e-9)) + 1
    return [lo_db + i * step_db for i in range(n)]


def failure_curve(channel: ChannelKind, link: LinkConfig, js_values: Sequence[float]) -> list[SweepPoint]:
    """Failure metric per J/S: BLER for coded channels, missed detection for sync signals."""
    fn = _failure_fn(channel, link)
    points = []
    for js in js_values:
        res, fail = fn(js)
        points.append(SweepPoint(js, res, fail))
    return points


def threshold_from_curve(points: Sequence[SweepPoint], level: float = DOS_FAILURE_LEVEL) -> float:
    for p in sorted(points, key=lambda p: p.j_s_ch_db):
        if p.failure >= level:
            return p.j_s_ch_db
    raise NoThresholdInRange(
        f"failure never reached {level} over J/S "
        f"{min(p.j_s_ch_db for p in points)}..{max(p.j_s_ch_db for p in points)} dB"
    )


def dos_threshold(
    channel: ChannelKind,
    link: LinkConfig,
    lo_db: float = -10.0,
    hi_db: float = 20.0,
    step_db: float = 1.0,
) -> float:
    """Smallest J/S_CH on a ``step_db`` grid whose failure metric reaches 0.9."""
    return threshold_from_curve(failure_curve(channel, link, sweep_range(lo_db, hi_db, step_db)))


def crossing_db(points: Sequence[SweepPoint], level: float) -> float | None:
    """Linear interpolation of where the failure metric first crosses ``level``."""
    pts = sorted(points, key=lambda p: p.j_s_ch_db)
    for a, b in zip(pts, pts[1:]):
        if a.failure < level <= b.failure:
            frac = (level - a.failure) / (b.failure - a.failure)
            return a.j_s_ch_db + frac * (b.j_s_ch_db - a.j_s_ch_db)
    if pts and pts[0].failure >= level:
        return pts[0].j_s_ch_db
    return None
