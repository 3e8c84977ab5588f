"""Ready-made constructions for the benchmark comparisons at N = 128 and 256.

All codes use the 5G reliability sequence. SPP rows list their Type-I blocks
``(N_l, K_l)``; ``type2`` says whether row-merging pairs are added on top.
"""

from __future__ import annotations

from .codec import CodeSpec, PAC_DEFAULT_POLY, ca_polar_code, deep_polar_code, pac_code, spp_code
from .crc import CRC3, CRC11
from .polar_core import load_5g_sequence

__all__ = ["SPP_TABLE", "benchmark_code", "spp_preset"]

# (N, K) -> (Type-I layers, CRC polynomial, row merging)
SPP_TABLE: dict[tuple[int, int], tuple[tuple[tuple[int, int], ...], tuple[int, ...], bool]] = {
    (128, 32): (((2, 1), (2, 1), (2, 1), (8, 3)), (), True),
    # row merging would lower the min-weight count below the listed target
    (128, 64): (((8, 2),), (), False),
    (128, 96): (((8, 3),), (), True),
    (256, 64): (((4, 1), (4, 1)), CRC3, True),
    (256, 128): (((4, 2),), CRC3, True),
    (256, 192): (((8, 7),) * 5, CRC3, True),
}


def spp_preset(N: int, K: int, type2: bool | None = None) -> CodeSpec:
    """SPP code for one of the tabulated ``(N, K)`` pairs; ``type2`` overrides the row setting."""
    try:
        layers, crc, merge = SPP_TABLE[(N, K)]
    except KeyError:
        raise ValueError(f"no SPP preset for (N, K) = ({N}, {K})") from None
    rel = load_5g_sequence(length=N)
    return spp_code(rel, K, layers, type2=merge if type2 is None else type2, crc_poly=crc)


def benchmark_code(family: str, N: int, K: int) -> CodeSpec:
    """CA-polar (CRC-11), PAC (RM profile at N=128, 5G profile otherwise) or deep polar benchmark."""
    rel = load_5g_sequence(length=N)
    if family == "ca_polar":
        return ca_polar_code(rel, K, CRC11)
    if family == "pac":
        return pac_code(rel, K, PAC_DEFAULT_POLY, profile="rm" if N == 128 else "reliability")
    if family == "deep_polar":
        inner = {128: (2, 16), 256: (2, 32)}.get(N)
        if inner is None:
            raise ValueError(f"no deep polar layer sizes for N = {N}")
        k1 = {128: 10, 256: 26}[N]
        return deep_polar_code(rel, K, (inner[0], inner[1], N), (1, k1, K - 1 - k1))
    if family == "spp":
        return spp_preset(N, K)
    raise ValueError(f"unknown benchmark family {family!r}")
