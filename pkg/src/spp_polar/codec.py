"""Code specifications, pre-transforms and encoders for every supported family.

Every family is a pre-transformed polar code ``x = v T G_N``: the payload
(message plus optional CRC) fills designated positions of ``v``, ``T`` is a
sparse upper-triangular matrix with unit diagonal and ``G_N`` the polar
transform. ``T`` is the product of ``G_m^T`` blocks embedded on index sets
(Type-I layers, row-merged pairs and, for deep polar codes, nested layers),
or the upper-triangular Toeplitz matrix of a convolution (PAC).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .construction import (
    MergedPairs,
    RateProfile,
    local_info_set,
    rate_profile,
    select_type2_pairs,
)
from .crc import CRC11, crc_bits, parse_poly
from .polar_core import Reliability, as_bits, generator_matrix, log2_int, polar_transform, row_weight, support

FAMILIES = ("polar", "spp", "ca_polar", "pac", "deep_polar")

# 1 + x^2 + x^3 + x^5 + x^6 (octal 133), the usual degree-6 PAC choice
PAC_DEFAULT_POLY = (1, 0, 1, 1, 0, 1, 1)

__all__ = [
    "FAMILIES",
    "PAC_DEFAULT_POLY",
    "CodeSpec",
    "PreTransform",
    "assemble_pretransform",
    "ca_polar_code",
    "deep_polar_code",
    "dynamic_frozen_value",
    "encode",
    "encode_deep_polar",
    "encode_pac",
    "pac_code",
    "polar_code",
    "rm_info_set",
    "spp_code",
]


def _reverse_transform(v: np.ndarray) -> np.ndarray:
    # v G^T = rev(rev(v) G) because G^T = J G J with J the reversal
    return polar_transform(v[..., ::-1])[..., ::-1]


class PreTransform:
    """Upper-triangular unit-diagonal ``T`` kept in structured form.

    ``blocks`` is a sequence of ``(positions, )`` index tuples, each carrying a
    ``G_m^T`` block with ``m = len(positions)``; ``T`` is their product in the
    given order. ``conv_poly`` (coefficients ``c_0..c_m``) adds the Toeplitz
    map ``u_i = sum_k c_k v_{i-k}`` after the blocks.
    """

    def __init__(self, N: int, blocks=(), conv_poly=()):
        self.N = N
        self.blocks = tuple(tuple(int(p) for p in b) for b in blocks)
        self.conv_poly = tuple(int(c) for c in conv_poly)
        for b in self.blocks:
            log2_int(len(b))
            if list(b) != sorted(set(b)) or b[0] < 0 or b[-1] >= N:
                raise ValueError("block positions must be ascending, distinct and inside [0, N)")
        if self.conv_poly and self.conv_poly[0] != 1:
            raise ValueError("convolution polynomial needs c_0 = 1")

    def apply(self, v) -> np.ndarray:
        """``u = v T`` for one vector or a batch ``(..., N)``."""
        u = np.array(as_bits(v, self.N), dtype=np.uint8, copy=True)
        for pos in self.blocks:
            idx = np.asarray(pos)
            u[..., idx] = _reverse_transform(u[..., idx])
        if len(self.conv_poly) > 1:
            src = u.copy()
            for shift, c in enumerate(self.conv_poly[1:], start=1):
                if c and shift < self.N:
                    u[..., shift:] ^= src[..., :self.N - shift]
        return u

    @cached_property
    def dense(self) -> np.ndarray:
        """Explicit ``N x N`` matrix assembled from the embedded blocks."""
        T = np.eye(self.N, dtype=np.uint8)
        for pos in self.blocks:
            idx = np.asarray(pos)
            local = np.eye(self.N, dtype=np.uint8)
            local[np.ix_(idx, idx)] = generator_matrix(log2_int(len(pos))).T
            T = (T.astype(np.int64) @ local % 2).astype(np.uint8)
        if len(self.conv_poly) > 1:
            conv = np.zeros((self.N, self.N), dtype=np.uint8)
            for shift, c in enumerate(self.conv_poly):
                if c:
                    conv += np.eye(self.N, k=shift, dtype=np.uint8)
            T = (T.astype(np.int64) @ conv % 2).astype(np.uint8)
        T.setflags(write=False)
        return T

    @cached_property
    def columns(self) -> tuple[np.ndarray, ...]:
        """For each column ``i`` the rows ``k < i`` with ``T[k, i] = 1``."""
        T = self.dense
        return tuple(np.flatnonzero(T[:i, i]) for i in range(self.N))

    @property
    def is_identity(self) -> bool:
        return not any(len(c) for c in self.columns)

    def max_column_weight(self) -> int:
        return int(self.dense.sum(axis=0).max())

    def inverse_apply(self, u) -> np.ndarray:
        """Recover ``v = u T^{-1}`` with the column recursion ``v_i = u_i + sum_k T[k,i] v_k``."""
        u = as_bits(u, self.N)
        v = np.zeros_like(u)
        for i, rows in enumerate(self.columns):
            acc = u[..., i].copy()
            if len(rows):
                acc ^= (v[..., rows].sum(axis=-1) % 2).astype(np.uint8)
            v[..., i] = acc
        return v


def dynamic_frozen_value(T: PreTransform, v_prefix, i: int) -> int:
    """Value ``u_i`` forced when ``v_i`` is frozen to zero: ``sum_{k<i} T[k,i] v_k``."""
    v_prefix = as_bits(v_prefix)
    if len(v_prefix) < i:
        raise ValueError(f"need at least {i} decoded bits, got {len(v_prefix)}")
    rows = T.columns[i]
    return int(v_prefix[rows].sum() % 2) if len(rows) else 0


@dataclass(frozen=True)
class CodeSpec:
    """Everything needed to encode and decode one code deterministically.

    ``profile.info0`` is the base information set before row merging; the
    information index of every merged pair is taken out of it. ``nested``
    holds deep-polar inner layers as ``(absolute positions, local info)``,
    innermost first. ``k`` counts message bits only; CRC bits travel in the
    base layer on its last positions.
    """

    family: str
    profile: RateProfile
    k: int
    pairs: MergedPairs = field(default_factory=MergedPairs)
    crc_poly: tuple[int, ...] = ()
    conv_poly: tuple[int, ...] = ()
    nested: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...] = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown code family {self.family!r}")
        object.__setattr__(self, "crc_poly", tuple(int(b) for b in self.crc_poly))
        object.__setattr__(self, "conv_poly", tuple(int(b) for b in self.conv_poly))
        object.__setattr__(self, "nested", tuple((tuple(map(int, p)), tuple(map(int, s))) for p, s in self.nested))
        if self.crc_poly and (self.crc_poly[0] != 1 or len(self.crc_poly) < 2):
            raise ValueError("CRC polynomial needs a leading 1 and degree >= 1")
        if self.conv_poly and self.conv_poly[0] != 1:
            raise ValueError("convolution polynomial needs c_0 = 1")
        if self.conv_poly and (self.profile.connections or self.pairs or self.nested):
            raise ValueError("a convolutional pre-transform cannot be combined with block pre-transforms")
        info0 = set(self.profile.info0)
        conn = self.profile.connection_union
        if not self.pairs.firsts <= info0:
            raise ValueError("merged pair information indices must belong to info0")
        if self.pairs.seconds & (info0 | conn):
            raise ValueError("merged indices must be frozen and outside every connection set")
        nested_pos = [p for pos, _ in self.nested for p in pos]
        if set(nested_pos) - conn:
            raise ValueError("nested layers must sit inside a connection set")
        if len(self.base_positions) < self.crc_length:
            raise ValueError("base layer is too small to carry the CRC bits")
        if self.k < 0 or len(self.payload_positions) != self.k + self.crc_length:
            raise ValueError(
                f"profile carries {len(self.payload_positions)} payload bits, "
                f"expected K + CRC = {self.k + self.crc_length}"
            )
        self.pretransform  # validates block geometry

    @property
    def n(self) -> int:
        return self.profile.n

    @property
    def N(self) -> int:
        return self.profile.N

    @property
    def crc_length(self) -> int:
        return max(len(self.crc_poly) - 1, 0)

    @property
    def rate(self) -> float:
        return self.k / self.N

    @cached_property
    def base_positions(self) -> tuple[int, ...]:
        # merged pair information indices stay in the base layer
        return self.profile.info0

    @cached_property
    def payload_positions(self) -> np.ndarray:
        """``v`` positions in payload order: base layer, Type-I layers, nested layers."""
        pos = list(self.base_positions)
        for a, info in zip(self.profile.connections, self.profile.layer_info):
            pos.extend(a[k] for k in info)
        for a, info in self.nested:
            pos.extend(a[k] for k in info)
        arr = np.array(pos, dtype=int)
        arr.setflags(write=False)
        return arr

    @cached_property
    def crc_slots(self) -> np.ndarray:
        """Payload slots holding CRC bits: the last ones of the base layer."""
        nb = len(self.base_positions)
        return np.arange(nb - self.crc_length, nb) if self.crc_length else np.zeros(0, dtype=int)

    @cached_property
    def message_slots(self) -> np.ndarray:
        slots = np.ones(len(self.payload_positions), dtype=bool)
        slots[self.crc_slots] = False
        return np.flatnonzero(slots)

    @cached_property
    def frozen_mask(self) -> np.ndarray:
        """True at ``v`` positions frozen to zero."""
        mask = np.ones(self.N, dtype=bool)
        mask[self.payload_positions] = False
        mask.setflags(write=False)
        return mask

    @cached_property
    def pretransform(self) -> PreTransform:
        blocks = [a for a, _ in self.nested]
        blocks += list(self.profile.connections)
        blocks += [pair for pair in self.pairs]
        return PreTransform(self.N, blocks, self.conv_poly)

    def payload(self, message) -> np.ndarray:
        """Message bits with the CRC inserted at its slots; accepts a batch."""
        message = as_bits(message, self.k)
        out = np.zeros(message.shape[:-1] + (len(self.payload_positions),), dtype=np.uint8)
        out[..., self.message_slots] = message
        if self.crc_length:
            out[..., self.crc_slots] = crc_bits(message, self.crc_poly)
        return out

    def place(self, message) -> np.ndarray:
        """The pre-transform input ``v`` for ``message``."""
        payload = self.payload(message)
        v = np.zeros(payload.shape[:-1] + (self.N,), dtype=np.uint8)
        v[..., self.payload_positions] = payload
        return v

    def crc_ok(self, payload) -> np.ndarray:
        """Whether each payload passes its CRC (always True without CRC)."""
        payload = np.asarray(payload, dtype=np.uint8)
        if not self.crc_length:
            return np.ones(payload.shape[:-1], dtype=bool)
        expect = crc_bits(payload[..., self.message_slots], self.crc_poly)
        return (expect == payload[..., self.crc_slots]).all(axis=-1)

    def to_dict(self) -> dict:
        return {
            "type": self.family,
            "N": self.N,
            "K": self.k,
            "profile": {
                "I0": list(self.profile.info0),
                "A": [list(a) for a in self.profile.connections],
                "I": [list(s) for s in self.profile.layer_info],
            },
            "merged_pairs": [list(p) for p in self.pairs],
            "crc_poly": "".join(map(str, self.crc_poly)) or None,
            "conv_poly": "".join(map(str, self.conv_poly)) or None,
            "nested": [{"A": list(a), "I": list(s)} for a, s in self.nested],
        }

    def to_json(self) -> str:
        text = json.dumps(self.to_dict(), indent=2)
        # keep integer lists on one line
        text = re.sub(r"\[\s*([-\d,\s]*?)\s*\]", lambda m: "[" + ", ".join(m.group(1).split()).replace(",,", ",") + "]", text)
        return text + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "CodeSpec":
        n = log2_int(int(data["N"]))
        prof = data["profile"]
        profile = RateProfile(n=n, info0=tuple(prof["I0"]), connections=tuple(map(tuple, prof.get("A", []))),
                              layer_info=tuple(map(tuple, prof.get("I", []))))
        return cls(
            family=data["type"],
            profile=profile,
            k=int(data["K"]),
            pairs=MergedPairs(tuple(tuple(p) for p in data.get("merged_pairs", []))),
            crc_poly=parse_poly(data["crc_poly"]) if data.get("crc_poly") else (),
            conv_poly=parse_poly(data["conv_poly"]) if data.get("conv_poly") else (),
            nested=tuple((tuple(b["A"]), tuple(b["I"])) for b in data.get("nested", [])),
        )

    @classmethod
    def from_json(cls, text: str) -> "CodeSpec":
        return cls.from_dict(json.loads(text))


def assemble_pretransform(spec: CodeSpec) -> PreTransform:
    return spec.pretransform


def encode(spec: CodeSpec, message) -> np.ndarray:
    """Encode one message of ``K`` bits, or a batch ``(..., K)``, to codewords.

    Bits are split in payload order (base layer first, then each Type-I
    layer, merged pairs and nested layers), mapped to ``v``, pushed through
    the local ``G^T`` blocks and finally through ``G_N``.
    """
    v = spec.place(message)
    return polar_transform(spec.pretransform.apply(v))


def encode_pac(spec: CodeSpec, message) -> np.ndarray:
    if spec.family != "pac":
        raise ValueError(f"expected a PAC code, got {spec.family}")
    return encode(spec, message)


def encode_deep_polar(spec: CodeSpec, message) -> np.ndarray:
    if spec.family != "deep_polar":
        raise ValueError(f"expected a deep polar code, got {spec.family}")
    return encode(spec, message)


# -- family builders ---------------------------------------------------------


def polar_code(reliability: Reliability, k: int) -> CodeSpec:
    n = log2_int(reliability.length)
    profile = RateProfile(n=n, info0=tuple(reliability.most_reliable(k)))
    return CodeSpec("polar", profile, k)


def ca_polar_code(reliability: Reliability, k: int, crc_poly=CRC11) -> CodeSpec:
    """Polar code whose ``K + r`` most reliable positions carry message and CRC."""
    r = len(crc_poly) - 1
    n = log2_int(reliability.length)
    profile = RateProfile(n=n, info0=tuple(reliability.most_reliable(k + r)))
    return CodeSpec("ca_polar", profile, k, crc_poly=tuple(crc_poly))


def spp_code(reliability: Reliability, k: int, layers=(), type2: bool = True, crc_poly=()) -> CodeSpec:
    """Sparsely pre-transformed polar code.

    ``layers`` lists the Type-I blocks ``(N_l, K_l)``; with ``type2`` the
    row-merging pairs are selected greedily on the resulting base layer.
    """
    r = max(len(crc_poly) - 1, 0)
    k0 = k + r - sum(kl for _, kl in layers)
    if k0 < 0:
        raise ValueError("Type-I layers carry more information bits than K")
    profile = rate_profile(reliability, k0, layers)
    pairs = select_type2_pairs(profile) if type2 else MergedPairs()
    return CodeSpec("spp", profile, k, pairs=pairs, crc_poly=tuple(crc_poly))


def rm_info_set(reliability: Reliability, k: int) -> tuple[int, ...]:
    """The ``k`` heaviest rows of ``G_N``, ties broken toward higher reliability."""
    n = log2_int(reliability.length)
    rank = reliability.rank()
    ranked = sorted(range(reliability.length), key=lambda i: (-row_weight(i, n), -rank[i]))
    return tuple(sorted(ranked[:k]))


def pac_code(reliability: Reliability, k: int, conv_poly=PAC_DEFAULT_POLY, profile: str = "rm") -> CodeSpec:
    """PAC code with an RM (``"rm"``) or reliability (``"reliability"``) rate profile."""
    n = log2_int(reliability.length)
    if profile == "rm":
        info = rm_info_set(reliability, k)
    elif profile == "reliability":
        info = tuple(reliability.most_reliable(k))
    else:
        raise ValueError(f"unknown PAC rate profile {profile!r}")
    conv_poly = tuple(int(c) for c in conv_poly)
    if not conv_poly or conv_poly[0] != 1 or set(conv_poly) - {0, 1}:
        raise ValueError("convolution polynomial must be bits with c_0 = 1")
    return CodeSpec("pac", RateProfile(n=n, info0=info), k, conv_poly=conv_poly)


def _lightest(local: tuple[int, ...], size: int, count: int) -> tuple[int, ...]:
    # lightest rows of G^T (column weight 2^(m - |S_r|)), ties to the smaller index
    m = log2_int(size)
    ranked = sorted(local, key=lambda r: (1 << (m - len(support(r))), r))
    return tuple(sorted(ranked[:count]))


def deep_polar_code(reliability: Reliability, k: int, sizes, ks) -> CodeSpec:
    """Serially nested polar pre-transforms with layer sizes ``sizes`` (last one ``N``).

    Layer ``l`` (size ``sizes[l]``) carries ``ks[l]`` message bits plus the
    ``sizes[l-1]`` outputs of the layer inside it. The outermost pre-transform
    layer is placed on the global index set by the rate-profile rule; each
    inner layer occupies the lightest non-frozen rows of the layer around it.
    """
    sizes, ks = [int(s) for s in sizes], [int(x) for x in ks]
    N = reliability.length
    if len(sizes) != len(ks) or len(sizes) < 2:
        raise ValueError("need matching layer sizes and dimensions, at least two layers")
    if sizes[-1] != N:
        raise ValueError(f"outermost layer size {sizes[-1]} must equal N = {N}")
    if sum(ks) != k:
        raise ValueError(f"layer dimensions sum to {sum(ks)}, expected K = {k}")
    for l in range(1, len(sizes)):
        if ks[l] + sizes[l - 1] > sizes[l]:
            raise ValueError(f"layer {l} of size {sizes[l]} cannot hold {ks[l]} + {sizes[l - 1]} inputs")
    if ks[0] > sizes[0]:
        raise ValueError("innermost layer dimension exceeds its size")
    top = len(sizes) - 2
    inner_in = sizes[top - 1] if top > 0 else 0
    profile0 = rate_profile(reliability, ks[-1], [(sizes[top], ks[top] + inner_in)])
    positions = profile0.connections[0]
    nonfrozen = profile0.layer_info[0]
    nested = []
    outer_info = nonfrozen
    for l in range(top, 0, -1):
        conn_local = _lightest(nonfrozen, sizes[l], sizes[l - 1])
        info_l = tuple(r for r in nonfrozen if r not in conn_local)
        if l == top:
            outer_info = info_l
        else:
            nested.append((positions, info_l))
        positions = tuple(positions[r] for r in conn_local)
        inner_in = sizes[l - 2] if l >= 2 else 0
        nonfrozen = local_info_set(sizes[l - 1], ks[l - 1] + inner_in)
    if top > 0:
        nested.append((positions, nonfrozen))
    nested.reverse()
    profile = RateProfile(n=profile0.n, info0=profile0.info0, connections=profile0.connections,
                          layer_info=(outer_info,))
    return CodeSpec("deep_polar", profile, k, nested=tuple(nested))
