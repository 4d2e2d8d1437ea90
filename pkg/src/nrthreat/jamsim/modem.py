"""Gray-mapped QPSK with max-log soft demapping."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import erfc

from ..errors import OddLength

_A = 1.0 / math.sqrt(2.0)


def qpsk_modulate(bits) -> np.ndarray:
    """Map bit pairs (b0, b1) to ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2).

    Works on the last axis, so a (batch, 2m) bit array gives (batch, m) symbols.
    """
    bits = np.asarray(bits)
    if bits.shape[-1] % 2:
        raise OddLength(f"QPSK needs an even number of bits, got {bits.shape[-1]}")
    b = bits.reshape(bits.shape[:-1] + (-1, 2)).astype(np.int8)
    return _A * ((1 - 2 * b[..., 0]) + 1j * (1 - 2 * b[..., 1]))


def qpsk_llr(symbols, noise_var: float) -> np.ndarray:
    """Per-bit LLR log(P(b=0)/P(b=1)); ``noise_var`` is the total complex noise power."""
    y = np.asarray(symbols)
    scale = 2.0 * math.sqrt(2.0) / noise_var
    llr = np.stack([scale * y.real, scale * y.imag], axis=-1)
    return llr.reshape(y.shape[:-1] + (-1,))


def qpsk_hard(symbols) -> np.ndarray:
    y = np.asarray(symbols)
    bits = np.stack([y.real < 0, y.imag < 0], axis=-1).astype(np.int8)
    return bits.reshape(y.shape[:-1] + (-1,))


def qfunc(x):
    return 0.5 * erfc(np.asarray(x) / math.sqrt(2.0))


def qpsk_theoretical_ber(ebn0_db):
    """Q(sqrt(2 Eb/N0)), the Gray QPSK bit error rate over AWGN."""
    return qfunc(np.sqrt(2.0 * 10.0 ** (np.asarray(ebn0_db) / 10.0)))
