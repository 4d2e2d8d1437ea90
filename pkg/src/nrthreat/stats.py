"""Monte-Carlo bookkeeping: seeded per-trial generators and 95% intervals."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

Z95 = 1.959963984540054
MIN_EVENTS_FOR_CI = 20


def trial_rng(seed: int, index: int, stream: int = 0) -> np.random.Generator:
    """Generator for one trial, fixed by (master seed, stream, trial index).

    Trials can run in any order or in parallel and still draw the same numbers.
    """
    return np.random.default_rng([int(seed), int(stream), int(index)])


@dataclass(frozen=True)
class SimResult:
    point_estimate: float
    confidence_halfwidth_95: float
    trials: int
    seed: int
    events: int
    samples: int

    @property
    def ci_valid(self) -> bool:
        """Normal-approximation interval is trusted only with enough events."""
        return self.events >= MIN_EVENTS_FOR_CI

    @property
    def ci_low(self) -> float:
        return max(0.0, self.point_estimate - self.confidence_halfwidth_95)

    @property
    def ci_high(self) -> float:
        return min(1.0, self.point_estimate + self.confidence_halfwidth_95)

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["ci_valid"] = self.ci_valid
        return rec


def proportion(events: int, samples: int, trials: int, seed: int) -> SimResult:
    p = events / samples if samples else 0.0
    half = Z95 * math.sqrt(p * (1.0 - p) / samples) if samples else 0.0
    return SimResult(p, half, trials, seed, int(events), int(samples))


def intervals_overlap(a: SimResult, b: SimResult) -> bool:
    return not (a.ci_high < b.ci_low or b.ci_high < a.ci_low)
