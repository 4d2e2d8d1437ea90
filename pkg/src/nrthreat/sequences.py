"""Synchronization sequences and the PSS correlation detector.

PSS and SSS follow the NR construction: the PSS is one length-127 m-sequence
(``x^7 + x^4 + 1``) cyclically shifted by ``43 * n_id_2``; the SSS is the
product of two m-sequences (``x^7 + x^4 + 1`` and ``x^7 + x + 1``, a
preferred pair) with shifts set by the cell ID, i.e. a Gold sequence.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidId, InvalidRoot, LengthMismatch, TooShort

SEQ_LEN = 127
N_ID_1_COUNT = 336
N_ID_2_COUNT = 3
N_CELL_IDS = N_ID_1_COUNT * N_ID_2_COUNT
PSS_SHIFT = 43


@dataclass(frozen=True)
class CellId:
    n_id_1: int
    n_id_2: int

    def __post_init__(self) -> None:
        if not (0 <= self.n_id_1 < N_ID_1_COUNT and 0 <= self.n_id_2 < N_ID_2_COUNT):
            raise InvalidId(f"invalid cell id components ({self.n_id_1}, {self.n_id_2})")

    @property
    def cell_id(self) -> int:
        return 3 * self.n_id_1 + self.n_id_2

    @classmethod
    def from_cell_id(cls, cell_id: int) -> "CellId":
        if not 0 <= cell_id < N_CELL_IDS:
            raise InvalidId(f"cell id {cell_id} outside 0..{N_CELL_IDS - 1}")
        return cls(cell_id // 3, cell_id % 3)


@dataclass(frozen=True)
class SyncSequence:
    kind: str
    values: np.ndarray


@dataclass(frozen=True)
class ZcSequence:
    root: int
    length: int
    values: np.ndarray


def _lfsr(taps: tuple[int, int], init: tuple[int, ...]) -> np.ndarray:
    """Binary sequence with x(i+7) = x(i+taps[0]) + x(i+taps[1]) mod 2."""
    x = list(init)
    for i in range(SEQ_LEN - len(init)):
        x.append((x[i + taps[0]] + x[i + taps[1]]) % 2)
    return np.array(x, dtype=np.int8)


@lru_cache(maxsize=None)
def _bases() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    pss = 1 - 2 * _lfsr((4, 0), (0, 1, 1, 0, 1, 1, 1))
    x0 = 1 - 2 * _lfsr((4, 0), (1, 0, 0, 0, 0, 0, 0))
    x1 = 1 - 2 * _lfsr((1, 0), (1, 0, 0, 0, 0, 0, 0))
    for arr in (pss, x0, x1):
        arr.setflags(write=False)
    return pss, x0, x1


def pss_delay(n_id_2: int) -> int:
    """Delay d with ``gen_pss(n_id_2) == np.roll(gen_pss(0), d)``."""
    return (-PSS_SHIFT * n_id_2) % SEQ_LEN


def gen_pss(n_id_2: int) -> SyncSequence:
    if n_id_2 not in range(N_ID_2_COUNT):
        raise InvalidId(f"n_id_2 must be 0, 1 or 2, got {n_id_2!r}")
    base = _bases()[0]
    # d(n) = base((n + 43 * n_id_2) mod 127)
    return SyncSequence("PSS", np.roll(base, pss_delay(n_id_2)).astype(float))


def sss_shifts(cell: CellId) -> tuple[int, int]:
    m0 = 15 * (cell.n_id_1 // 112) + 5 * cell.n_id_2
    m1 = cell.n_id_1 % 112
    return m0, m1


def gen_sss(cell: CellId) -> SyncSequence:
    if not isinstance(cell, CellId):
        raise InvalidId(f"expected CellId, got {cell!r}")
    _, x0, x1 = _bases()
    m0, m1 = sss_shifts(cell)
    return SyncSequence("SSS", (np.roll(x0, -m0) * np.roll(x1, -m1)).astype(float))


def all_sss() -> np.ndarray:
    """All 1008 SSS sequences as a (cell_id, 127) array."""
    return np.stack([gen_sss(CellId.from_cell_id(c)).values for c in range(N_CELL_IDS)])


def gen_zadoff_chu(root: int, length: int) -> ZcSequence:
    if length < 1 or length % 2 == 0:
        raise InvalidRoot(f"length must be odd and positive, got {length}")
    if root % length == 0 or math.gcd(root, length) != 1:
        raise InvalidRoot(f"root {root} is not coprime with length {length}")
    n = np.arange(length)
    return ZcSequence(root, length, np.exp(-1j * np.pi * root * n * (n + 1) / length))


def periodic_xcorr(a, b) -> np.ndarray:
    """|sum_n conj(a[n]) * b[(n + lag) mod N]| / N for every lag.

    The peak sits at the delay d for which ``b == np.roll(a, d)``.  A
    unit-modulus sequence correlated with itself gives 1.0 at lag 0.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch(f"sequences must have equal 1-D shape, got {a.shape} and {b.shape}")
    n = a.size
    corr = np.fft.ifft(np.conj(np.fft.fft(a)) * np.fft.fft(b))
    return np.abs(corr) / n


def raw_periodic_xcorr(a, b) -> np.ndarray:
    """Unnormalized, signed version of :func:`periodic_xcorr` for real sequences."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch("sequences must have equal length")
    if a.ndim != 1:
        raise LengthMismatch("sequences must be 1-D")
    # direct circular sums keep integer-valued sequences exact
    idx = (np.arange(a.size)[:, None] + np.arange(a.size)[None, :]) % a.size
    return b[idx] @ a


def sequences_to_csv(values: np.ndarray) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    complex_valued = np.iscomplexobj(values)
    writer.writerow(["index", "real", "imag"] if complex_valued else ["index", "value"])
    for i, v in enumerate(values):
        writer.writerow([i, repr(float(v.real)), repr(float(v.imag))] if complex_valued else [i, repr(float(v))])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Detection


@dataclass(frozen=True)
class Candidate:
    n_id_2: int
    lag: int
    metric: float


@lru_cache(maxsize=None)
def _pss_bank_fft(length: int) -> np.ndarray:
    bank = np.zeros((N_ID_2_COUNT, length))
    for nid in range(N_ID_2_COUNT):
        bank[nid, :SEQ_LEN] = gen_pss(nid).values
    out = np.conj(np.fft.fft(bank, axis=-1))
    out.setflags(write=False)
    return out


def pss_metrics(received: np.ndarray) -> np.ndarray:
    """Normalized correlation of every PSS against every circular window.

    ``received`` has shape (..., L).  Returns (..., 3, L) where entry
    ``[nid, lag]`` is ``|<r[lag:lag+127], pss>| / (||r[lag:lag+127]|| * sqrt(127))``
    with windows taken circularly.  The metric lies in [0, 1] and does not
    change when ``received`` is scaled.
    """
    r = np.asarray(received)
    length = r.shape[-1]
    if length < SEQ_LEN:
        raise TooShort(f"need at least {SEQ_LEN} samples, got {length}")
    spectrum = np.fft.fft(r, axis=-1)[..., None, :]
    corr = np.abs(np.fft.ifft(spectrum * _pss_bank_fft(length), axis=-1))
    # circular sliding window energy: E[lag] = sum_{n<127} |r[(lag+n) mod L]|^2
    power = np.abs(r) ** 2
    csum = np.concatenate([np.zeros(r.shape[:-1] + (1,)), np.cumsum(np.concatenate([power, power], axis=-1), axis=-1)], axis=-1)
    energy = csum[..., SEQ_LEN:SEQ_LEN + length] - csum[..., :length]
    denom = np.sqrt(np.maximum(energy, 0.0) * SEQ_LEN)[..., None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        metric = np.where(denom > 0, corr / np.where(denom > 0, denom, 1.0), 0.0)
    return np.clip(metric, 0.0, 1.0)


def detect_pss(received, fa_threshold: float) -> list[Candidate]:
    """All (n_id_2, lag) hypotheses whose metric exceeds ``fa_threshold``, strongest first."""
    metrics = pss_metrics(np.asarray(received))
    nid, lag = np.nonzero(metrics > fa_threshold)
    found = [Candidate(int(i), int(k), float(metrics[i, k])) for i, k in zip(nid, lag)]
    found.sort(key=lambda c: (-c.metric, c.n_id_2, c.lag))
    return found


@dataclass(frozen=True)
class DetectorCalibration:
    threshold: float
    false_alarm: float
    sample_length: int
    trials: int
    seed: int


def complex_noise(rng: np.random.Generator, shape, power: float = 1.0) -> np.ndarray:
    scale = math.sqrt(power / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def calibrate_pss_threshold(
    sample_length: int = 2 * SEQ_LEN,
    false_alarm: float = 0.01,
    trials: int = 10_000,
    seed: int = 0,
    batch: int = 2_000,
) -> DetectorCalibration:
    """Threshold on the peak metric so pure noise triggers with probability ``false_alarm``."""
    if sample_length < SEQ_LEN:
        raise TooShort(f"need at least {SEQ_LEN} samples, got {sample_length}")
    rng = np.random.default_rng(seed)
    peaks = []
    for start in range(0, trials, batch):
        n = min(batch, trials - start)
        noise = complex_noise(rng, (n, sample_length))
        peaks.append(pss_metrics(noise).reshape(n, -1).max(axis=-1))
    threshold = float(np.quantile(np.concatenate(peaks), 1.0 - false_alarm))
    return DetectorCalibration(threshold, false_alarm, sample_length, trials, seed)


@lru_cache(maxsize=None)
def default_pss_calibration() -> DetectorCalibration:
    return calibrate_pss_threshold()
