"""Independent reference implementations used as test oracles.

Nothing here shares code with the package beyond reading spec fields.
"""

import itertools
import math

import numpy as np


def kron_generator(n):
    F = np.array([[1, 0], [1, 1]], dtype=np.int64)
    G = np.ones((1, 1), dtype=np.int64)
    for _ in range(n):
        G = np.kron(G, F)
    return G


def dense_pretransform(spec):
    """T built from scratch: embedded G^T blocks multiplied in order, then the Toeplitz map."""
    N = spec.N
    T = np.eye(N, dtype=np.int64)
    blocks = [a for a, _ in spec.nested] + list(spec.profile.connections) + [p for p in spec.pairs]
    for pos in blocks:
        m = len(pos)
        local = np.eye(N, dtype=np.int64)
        Gt = kron_generator(int(math.log2(m))).T
        for r, pr in enumerate(pos):
            for c, pc in enumerate(pos):
                local[pr, pc] = Gt[r, c]
        T = T @ local % 2
    if len(spec.conv_poly) > 1:
        C = np.zeros((N, N), dtype=np.int64)
        for i in range(N):
            for k, c in enumerate(spec.conv_poly):
                if c and i + k < N:
                    C[i, i + k] = 1
        T = T @ C % 2
    return T


def crc_long_division(bits, poly):
    """Remainder of m(x) x^r mod g(x), MSB first, bit by bit on Python lists."""
    r = len(poly) - 1
    reg = list(bits) + [0] * r
    for i in range(len(bits)):
        if reg[i]:
            for k in range(r + 1):
                reg[i + k] ^= poly[k]
    return reg[-r:]


def dense_encode(spec, msg):
    """v T G_N with v filled from the message (CRC via long division)."""
    payload = np.zeros(len(spec.payload_positions), dtype=np.int64)
    payload[spec.message_slots] = msg
    if spec.crc_length:
        payload[spec.crc_slots] = crc_long_division([int(b) for b in msg], spec.crc_poly)
    v = np.zeros(spec.N, dtype=np.int64)
    v[spec.payload_positions] = payload
    return v @ dense_pretransform(spec) @ kron_generator(spec.n) % 2


def sc_decode(spec, llr):
    """Recursive successive cancellation with min-sum f and dynamic frozen bits."""
    T = dense_pretransform(spec)
    frozen = np.ones(spec.N, dtype=bool)
    frozen[spec.payload_positions] = False
    v = [0] * spec.N
    llr = [min(max(float(x), -1e6), 1e6) for x in llr]

    def leaf(lam, i):
        s = sum(T[k, i] * v[k] for k in range(i)) % 2
        if frozen[i]:
            v[i] = 0
            return s
        u = 1 if lam < 0 else 0
        v[i] = u ^ s
        return u

    def rec(lams, offset):
        if len(lams) == 1:
            return [leaf(lams[0], offset)]
        h = len(lams) // 2
        a, b = lams[:h], lams[h:]
        left = [math.copysign(min(abs(x), abs(y)), 1.0) * (1 if (x > 0) == (y > 0) else -1) if x and y else 0.0
                for x, y in zip(a, b)]
        xa = rec(left, offset)
        right = [y - x if c else y + x for x, y, c in zip(a, b, xa)]
        xb = rec(right, offset + h)
        return [p ^ q for p, q in zip(xa, xb)] + xb

    rec(llr, 0)
    payload = np.array(v)[spec.payload_positions]
    return payload[spec.message_slots]


def all_messages(k):
    return np.array(list(itertools.product([0, 1], repeat=k)), dtype=np.uint8).reshape(-1, k)


def ml_decode(codebook, llr):
    """Index of the codeword maximizing the correlation sum llr_j (1 - 2 x_j)."""
    return int(np.argmax((1.0 - 2.0 * codebook) @ llr))


def exhaustive_spectrum(spec, encode):
    msgs = all_messages(spec.k)
    w = encode(spec, msgs).sum(axis=1)
    vals, counts = np.unique(w, return_counts=True)
    return {int(a): int(b) for a, b in zip(vals, counts)}
