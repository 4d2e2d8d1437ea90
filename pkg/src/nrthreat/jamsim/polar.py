"""Polar code with Bhattacharyya construction and batched SC decoding.

The transform is x = u F^{(x)n} with F = [[1, 0], [1, 1]] and natural
(non bit-reversed) ordering.  Both the encoder and the decoder recurse on
halves: for u = (a, b), x = (enc(a) xor enc(b), enc(b)), and the first half
is decoded on the degraded ("minus") channel.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import SizeMismatch


def _check_length(n: int) -> None:
    if n < 1 or n & (n - 1):
        raise SizeMismatch(f"code length must be a power of two, got {n}")


def bhattacharyya_frozen_set(n: int, k: int, design_snr_db: float = 0.0) -> np.ndarray:
    """Indices of the n - k least reliable synthetic channels, sorted ascending.

    ``design_snr_db`` is the QPSK symbol SNR; each coded bit then sees a
    BPSK-equivalent channel with Bhattacharyya parameter exp(-snr / 2).
    """
    _check_length(n)
    if not 0 <= k <= n:
        raise SizeMismatch(f"need 0 <= k <= n, got k={k}, n={n}")
    snr = 10.0 ** (design_snr_db / 10.0)
    z = np.array([math.exp(-snr / 2.0)])
    for _ in range(int(math.log2(n))):
        nxt = np.empty(2 * z.size)
        nxt[0::2] = 2 * z - z * z
        nxt[1::2] = z * z
        z = nxt
    # stable sort on -z puts the least reliable first; ties resolved toward lower index
    order = np.argsort(-z, kind="stable")
    return np.sort(order[: n - k])


def info_positions(n: int, frozen_set) -> np.ndarray:
    mask = np.ones(n, dtype=bool)
    mask[np.asarray(frozen_set, dtype=int)] = False
    return np.flatnonzero(mask)


def _transform(u: np.ndarray) -> np.ndarray:
    x = u.copy()
    step = x.shape[-1]
    # iterative butterfly, equivalent to the halves recursion
    while step > 1:
        half = step // 2
        view = x.reshape(x.shape[:-1] + (-1, step))
        view[..., :half] ^= view[..., half:]
        step = half
    return x


def polar_encode(bits, frozen_set, n: int) -> np.ndarray:
    """Place ``bits`` on the information positions (frozen bits = 0) and transform.

    ``bits`` may be batched on leading axes.
    """
    _check_length(n)
    info = info_positions(n, frozen_set)
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.shape[-1] != info.size:
        raise SizeMismatch(f"expected {info.size} payload bits, got {bits.shape[-1]}")
    u = np.zeros(bits.shape[:-1] + (n,), dtype=np.uint8)
    u[..., info] = bits
    return _transform(u)


def generator_matrix(n: int) -> np.ndarray:
    _check_length(n)
    g = np.ones((1, 1), dtype=np.uint8)
    kernel = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    while g.shape[0] < n:
        g = np.kron(g, kernel)
    return g


def _f(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # min-sum check-node update
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def _g(a: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    return b + (1 - 2 * x.astype(np.float64)) * a


def _sc(llr: np.ndarray, frozen: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (u_hat, x_hat) for a batch of LLR rows."""
    n = llr.shape[-1]
    if n == 1:
        if frozen[0]:
            u = np.zeros(llr.shape, dtype=np.uint8)
        else:
            u = (llr < 0).astype(np.uint8)
        return u, u
    half = n // 2
    a, b = llr[..., :half], llr[..., half:]
    if frozen.all():
        zeros = np.zeros(llr.shape, dtype=np.uint8)
        return zeros, zeros
    u_a, x_a = _sc(_f(a, b), frozen[:half])
    u_b, x_b = _sc(_g(a, b, x_a), frozen[half:])
    return np.concatenate([u_a, u_b], axis=-1), np.concatenate([x_a ^ x_b, x_b], axis=-1)


def polar_decode_sc(llrs, frozen_set, n: int) -> np.ndarray:
    """Successive-cancellation decoding; returns the payload bits (batched)."""
    _check_length(n)
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.shape[-1] != n:
        raise SizeMismatch(f"expected {n} LLRs, got {llrs.shape[-1]}")
    frozen = np.zeros(n, dtype=bool)
    frozen[np.asarray(frozen_set, dtype=int)] = True
    u, _ = _sc(llrs, frozen)
    return u[..., ~frozen]


class PolarCode:
    def __init__(self, n: int = 256, k: int = 85, design_snr_db: float = 0.0):
        _check_length(n)
        if not 0 <= k < n:
            raise SizeMismatch(f"need 0 <= k < n, got k={k}, n={n}")
        self.n = n
        self.k = k
        self.design_snr_db = design_snr_db
        self.frozen_set = bhattacharyya_frozen_set(n, k, design_snr_db)

    @property
    def rate(self) -> float:
        return self.k / self.n

    def encode(self, bits) -> np.ndarray:
        return polar_encode(bits, self.frozen_set, self.n)

    def decode(self, llrs) -> np.ndarray:
        return polar_decode_sc(llrs, self.frozen_set, self.n)

    def __repr__(self) -> str:
        return f"PolarCode(n={self.n}, k={self.k}, design_snr_db={self.design_snr_db})"
