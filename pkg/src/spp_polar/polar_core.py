"""Polar transform arithmetic, index combinatorics and bit-channel reliability.

Bit vectors are plain ``numpy`` arrays of dtype ``uint8`` holding 0/1 entries.
All indices are 0-based; index ``i`` has binary expansion
``i = sum_k i_k 2**k`` and support ``S_i = {k : i_k = 1}``.

The polar transform is ``x = u G_N`` with ``G_N`` the n-fold Kronecker power of
``[[1, 0], [1, 1]]`` and no bit-reversal permutation, so the most significant
bit of a bit-channel index selects the first (outermost) channel split.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

__all__ = [
    "Reliability",
    "as_bits",
    "bec_reliability",
    "ga_reliability",
    "generator_matrix",
    "is_power_of_two",
    "load_5g_sequence",
    "log2_int",
    "polar_transform",
    "precedes",
    "row_weight",
    "support",
]

NR_SEQUENCE_LENGTH = 1024


def is_power_of_two(value: int) -> bool:
    return value >= 1 and value & (value - 1) == 0


def log2_int(length: int) -> int:
    if not is_power_of_two(length):
        raise ValueError(f"length must be a power of two, got {length}")
    return length.bit_length() - 1


def as_bits(bits, length: int | None = None) -> np.ndarray:
    """Return ``bits`` as a ``uint8`` array, checking 0/1 entries and length."""
    arr = np.asarray(bits)
    if arr.dtype == bool:
        arr = arr.astype(np.uint8)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("bit vector entries must be 0 or 1")
    arr = arr.astype(np.uint8, copy=False)
    if length is not None and arr.shape[-1] != length:
        raise ValueError(f"expected {length} bits, got {arr.shape[-1]}")
    return arr


def polar_transform(u) -> np.ndarray:
    """Compute ``u G_N`` over GF(2) with the O(N log N) butterfly.

    Works on the last axis, so a batch of vectors of shape ``(..., N)`` is
    transformed row by row. ``G_N`` is its own inverse over GF(2).
    """
    x = np.array(as_bits(u), dtype=np.uint8, copy=True)
    length = x.shape[-1]
    log2_int(length)
    lead = x.shape[:-1]
    half = 1
    while half < length:
        # blocks of 2*half: first half ^= second half
        view = x.reshape(*lead, length // (2 * half), 2, half)
        view[..., 0, :] ^= view[..., 1, :]
        half *= 2
    return x


def generator_matrix(n: int) -> np.ndarray:
    """Dense ``G_N`` for ``N = 2**n`` (rows are the polar transform of unit vectors)."""
    return polar_transform(np.eye(1 << n, dtype=np.uint8))


def support(i: int) -> frozenset[int]:
    """Bit positions set in ``i``."""
    if i < 0:
        raise ValueError("index must be non-negative")
    return frozenset(k for k in range(i.bit_length()) if (i >> k) & 1)


def row_weight(i: int, n: int) -> int:
    """Hamming weight of row ``i`` of ``G_N``, which equals ``2**|S_i|``."""
    if not 0 <= i < (1 << n):
        raise IndexError(f"index {i} out of range for N={1 << n}")
    return 1 << bin(i).count("1")


def precedes(j: int, i: int) -> bool:
    """Universal partial order: True when bit-channel ``j`` is never more reliable than ``i``.

    ``j`` precedes ``i`` iff ``i`` can be reached from ``j`` by setting zero
    bits to one and by moving ones to more significant zero positions.
    Equivalently, with both supports sorted in decreasing order,
    ``|S_j| <= |S_i|`` and the t-th largest element of ``S_j`` is at most the
    t-th largest element of ``S_i``.
    """
    sj = sorted(support(j), reverse=True)
    si = sorted(support(i), reverse=True)
    if len(sj) > len(si):
        return False
    return all(a <= b for a, b in zip(sj, si))


@dataclass(frozen=True)
class Reliability:
    """Per-index reliability metric and the induced ordering.

    ``values[i]`` grows with the reliability of bit-channel ``i`` (capacity for
    the BEC, mean LLR for the Gaussian approximation, rank for a reliability
    sequence). ``order`` lists all indices from least to most reliable; ties
    keep the smaller index first.
    """

    values: np.ndarray
    order: np.ndarray
    kind: str

    def __post_init__(self):
        n_idx = len(self.values)
        if sorted(self.order.tolist()) != list(range(n_idx)):
            raise ValueError("order must be a permutation of the indices")
        self.values.setflags(write=False)
        self.order.setflags(write=False)

    @classmethod
    def from_values(cls, values, kind: str) -> "Reliability":
        values = np.asarray(values, dtype=float)
        order = np.argsort(values, kind="stable")
        return cls(values=values, order=order, kind=kind)

    @property
    def length(self) -> int:
        return len(self.values)

    def rank(self) -> np.ndarray:
        """Position of each index in ``order`` (0 = least reliable)."""
        pos = np.empty(self.length, dtype=int)
        pos[self.order] = np.arange(self.length)
        return pos

    def most_reliable(self, count: int) -> list[int]:
        """The ``count`` most reliable indices, most reliable first."""
        if not 0 <= count <= self.length:
            raise ValueError(f"cannot pick {count} of {self.length} indices")
        return self.order[::-1][:count].tolist()


def bec_reliability(n: int, eps: float) -> Reliability:
    """Exact bit-channel capacities ``1 - Z_i`` of the polarized BEC(eps)."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"erasure probability must lie in (0, 1), got {eps}")
    if n < 0:
        raise ValueError("n must be non-negative")
    z = np.array([eps], dtype=float)
    for _ in range(n):
        nxt = np.empty(2 * z.size)
        nxt[0::2] = 2.0 * z - z * z
        nxt[1::2] = z * z
        z = nxt
    return Reliability.from_values(1.0 - z, kind="bec")


# Gaussian approximation with the two-segment phi function
#   phi(x) = exp(0.0564 x**2 - 0.48560 x)                   0 <= x < 0.6307
#   phi(x) = exp(-0.4527 x**0.86 + 0.0218)                  0.6307 <= x < 10
#   phi(x) = sqrt(pi / x) exp(-x / 4) (1 - 10 / (7 x))      x >= 10
# evaluated in the log domain so large means do not underflow.
_PHI_SPLIT = 10.0
_PHI_TINY = 0.6307


def _log_phi(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    # the middle segment exceeds 1 near zero, which breaks channel ordering
    tiny = x < _PHI_TINY
    low = ~tiny & (x < _PHI_SPLIT)
    out[tiny] = 0.0564 * x[tiny] ** 2 - 0.48560 * x[tiny]
    out[low] = -0.4527 * np.power(x[low], 0.86) + 0.0218
    hi = x[x >= _PHI_SPLIT]
    out[x >= _PHI_SPLIT] = 0.5 * np.log(np.pi / hi) - hi / 4.0 + np.log1p(-10.0 / (7.0 * hi))
    return out


def _log_phi_inverse(target: np.ndarray) -> np.ndarray:
    """Invert ``_log_phi``; bisection except on the quadratic segment."""
    target = np.asarray(target, dtype=float)
    a, b = 0.0564, 0.48560
    tiny = target > a * _PHI_TINY**2 - b * _PHI_TINY
    # root of a x^2 - b x - t = 0 in the cancellation-free form
    quad = -2.0 * target / (b + np.sqrt(np.maximum(b * b + 4.0 * a * target, 0.0)))
    return np.where(tiny, quad, _log_phi_bisect(target))


def _log_phi_bisect(target: np.ndarray) -> np.ndarray:
    lo = np.zeros_like(target)
    hi = np.full_like(target, _PHI_SPLIT)
    # log phi(x) ~ -x/4 for large x
    while True:
        short = _log_phi(hi) > target
        if not short.any():
            break
        hi[short] *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        above = _log_phi(mid) > target
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
        if np.all(hi - lo <= 1e-12 * np.maximum(1.0, hi)):
            break
    return 0.5 * (lo + hi)


def _ga_minus(mean: np.ndarray) -> np.ndarray:
    # phi_out = 1 - (1 - phi)^2 = phi (2 - phi); the second form loses
    # precision when phi is close to 1
    lp = _log_phi(mean)
    q = -np.expm1(lp)
    with np.errstate(divide="ignore"):
        target = np.where(lp > -0.5, np.log1p(-q * q), lp + np.log(2.0 - np.exp(lp)))
    out = _log_phi_inverse(target)
    return np.where(mean <= 0.0, 0.0, out)


def ga_reliability(n: int, design_snr: float, rate: float) -> Reliability:
    """Mean bit-channel LLRs under the Gaussian approximation for BI-AWGN.

    ``design_snr`` is Eb/N0 in dB; the channel LLR mean is ``4 R Eb/N0``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"rate must lie in (0, 1], got {rate}")
    mean = np.array([4.0 * rate * 10.0 ** (design_snr / 10.0)])
    for _ in range(n):
        nxt = np.empty(2 * mean.size)
        nxt[0::2] = _ga_minus(mean)
        nxt[1::2] = 2.0 * mean
        mean = nxt
    return Reliability.from_values(mean, kind="ga")


def default_sequence_path() -> Path:
    return Path(str(resources.files("spp_polar") / "data" / "nr_polar_sequence.txt"))


def load_5g_sequence(path=None, length: int = NR_SEQUENCE_LENGTH) -> Reliability:
    """Read a reliability sequence file and extract the length-``length`` sub-sequence.

    The file holds one integer per line, a permutation of ``0..1023`` listed
    from least to most reliable. Entries below ``length`` are kept in file
    order. ``path=None`` loads the packaged 3GPP sequence.
    """
    if not is_power_of_two(length):
        raise ValueError(f"length must be a power of two, got {length}")
    if length > NR_SEQUENCE_LENGTH:
        raise ValueError(f"length {length} exceeds the sequence length {NR_SEQUENCE_LENGTH}")
    path = default_sequence_path() if path is None else Path(path)
    entries = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            entries.append(int(line))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: not an integer: {line!r}") from None
    if len(entries) != NR_SEQUENCE_LENGTH:
        raise ValueError(f"{path}: expected {NR_SEQUENCE_LENGTH} entries, got {len(entries)}")
    if len(set(entries)) != len(entries):
        raise ValueError(f"{path}: duplicate entries")
    if min(entries) != 0 or max(entries) != NR_SEQUENCE_LENGTH - 1:
        raise ValueError(f"{path}: entries must be a permutation of 0..{NR_SEQUENCE_LENGTH - 1}")
    order = np.array([e for e in entries if e < length], dtype=int)
    values = np.empty(length, dtype=float)
    values[order] = np.arange(length)
    return Reliability(values=values, order=order, kind="5g")
