"""Cyclic redundancy checks over GF(2).

Polynomials are bit tuples from the highest-degree coefficient down to x^0,
e.g. ``1 + x + x^3`` is ``(1, 0, 1, 1)``. The first message bit is the
highest-degree coefficient of the message polynomial.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

CRC3 = (1, 0, 1, 1)
# x^11 + x^10 + x^9 + x^5 + 1
CRC11 = (1, 1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1)


def parse_poly(text: str) -> tuple[int, ...]:
    """Parse a polynomial given as a bit string such as ``"1011"``."""
    text = text.strip()
    if not text or set(text) - {"0", "1"}:
        raise ValueError(f"polynomial must be a non-empty bit string, got {text!r}")
    bits = tuple(int(c) for c in text)
    if bits[0] != 1:
        raise ValueError("polynomial bit string must start with its leading 1")
    return bits


def crc_remainder(message, poly) -> np.ndarray:
    """Remainder of ``m(x) x^r`` divided by ``g(x)`` by long division."""
    poly = np.asarray(poly, dtype=np.uint8)
    r = len(poly) - 1
    reg = np.concatenate([np.asarray(message, dtype=np.uint8), np.zeros(r, dtype=np.uint8)])
    for i in range(len(reg) - r):
        if reg[i]:
            reg[i:i + r + 1] ^= poly
    return reg[len(reg) - r:].copy()


@lru_cache(maxsize=64)
def crc_matrix(length: int, poly: tuple[int, ...]) -> np.ndarray:
    """Matrix ``C`` with ``crc(m) = m C mod 2`` for messages of ``length`` bits."""
    eye = np.eye(length, dtype=np.uint8)
    mat = np.array([crc_remainder(row, poly) for row in eye], dtype=np.uint8)
    mat.setflags(write=False)
    return mat.reshape(length, len(poly) - 1)


def crc_bits(messages, poly) -> np.ndarray:
    """CRC of one message or of a batch ``(..., length)``."""
    messages = np.asarray(messages, dtype=np.uint8)
    mat = crc_matrix(messages.shape[-1], tuple(int(b) for b in poly))
    return (messages.astype(np.int64) @ mat % 2).astype(np.uint8)
