"""Code construction: rate profiling, row-merging pair selection, coset analysis.

All index sets are 0-based and stored as ascending tuples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .polar_core import Reliability, is_power_of_two, log2_int, precedes, row_weight, support

__all__ = [
    "CosetReport",
    "MergedPairs",
    "RateProfile",
    "compute_k_set",
    "local_info_set",
    "min_weight_lower_bound",
    "rate_profile",
    "select_type2_pairs",
    "swap_gain",
    "merge_clears_coset",
]


@dataclass(frozen=True)
class RateProfile:
    """Index partition produced by the rate-profile algorithm.

    ``info0`` is the base-layer information set, ``connections[l]`` the
    connection set feeding Type-I block ``l`` (ascending) and ``layer_info[l]``
    the information positions inside that block, a subset of
    ``range(len(connections[l]))``. Everything else is frozen.
    """

    n: int
    info0: tuple[int, ...]
    connections: tuple[tuple[int, ...], ...] = ()
    layer_info: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        N = 1 << self.n
        object.__setattr__(self, "info0", tuple(sorted(int(i) for i in self.info0)))
        object.__setattr__(self, "connections", tuple(tuple(sorted(int(i) for i in a)) for a in self.connections))
        object.__setattr__(self, "layer_info", tuple(tuple(sorted(int(i) for i in s)) for s in self.layer_info))
        if len(self.connections) != len(self.layer_info):
            raise ValueError("one information set is required per connection set")
        seen = set(self.info0)
        if len(seen) != len(self.info0):
            raise ValueError("duplicate index in info0")
        for a, info in zip(self.connections, self.layer_info):
            if not is_power_of_two(len(a)):
                raise ValueError(f"connection set size {len(a)} is not a power of two")
            if seen & set(a) or len(set(a)) != len(a):
                raise ValueError("connection sets and info0 must be pairwise disjoint")
            seen |= set(a)
            if len(set(info)) != len(info) or any(not 0 <= k < len(a) for k in info):
                raise ValueError("layer information indices must lie in [0, N_l - 1]")
        if any(not 0 <= i < N for i in seen):
            raise ValueError(f"index out of range for N={N}")

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def k(self) -> int:
        return len(self.info0) + sum(len(s) for s in self.layer_info)

    @property
    def connection_union(self) -> frozenset[int]:
        return frozenset(i for a in self.connections for i in a)

    @property
    def frozen0(self) -> tuple[int, ...]:
        used = set(self.info0) | self.connection_union
        return tuple(i for i in range(self.N) if i not in used)


@dataclass(frozen=True)
class MergedPairs:
    """Row-merged pairs ``(info index, merged frozen index)`` in selection order."""

    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        pairs = tuple((int(i), int(j)) for i, j in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if any(i >= j for i, j in pairs):
            raise ValueError("every merged pair needs info index < merged index")
        idx = [k for p in pairs for k in p]
        if len(set(idx)) != len(idx):
            raise ValueError("merged pairs must not share indices")

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    @property
    def firsts(self) -> frozenset[int]:
        return frozenset(i for i, _ in self.pairs)

    @property
    def seconds(self) -> frozenset[int]:
        return frozenset(j for _, j in self.pairs)


@dataclass(frozen=True)
class CosetReport:
    """Lower bound on the number of min-weight codewords, per coset leader."""

    w_min: int
    k_sizes: dict[int, int] = field(default_factory=dict)

    @property
    def per_coset(self) -> dict[int, int]:
        return {i: 1 << size for i, size in self.k_sizes.items()}

    @property
    def total(self) -> int:
        return sum(self.per_coset.values())


def compute_k_set(i: int, info: Iterable[int]) -> tuple[int, ...]:
    """Later information indices ``j`` with ``|S_j minus S_i| = 1``."""
    si = support(i)
    return tuple(sorted(j for j in set(info) if j > i and len(support(j) - si) == 1))


def min_weight_lower_bound(info: Iterable[int], n: int) -> CosetReport:
    """Count ``2**len(compute_k_set(i))`` for every min-weight leader ``i`` of the information set."""
    info = sorted(set(info))
    if not info:
        raise ValueError("information set is empty")
    w_min = min(row_weight(i, n) for i in info)
    sizes = {i: len(compute_k_set(i, info)) for i in info if row_weight(i, n) == w_min}
    return CosetReport(w_min=w_min, k_sizes=sizes)


def swap_gain(i: int, j: int, info: Iterable[int], n: int) -> int | None:
    """Guaranteed reduction of ``A_wmin`` when frozen ``i`` replaces information ``j``.

    Needs ``j`` in the k-set of ``i`` computed over the information set.
    Returns ``None`` when the gain is not positive or that k-set is empty, where the
    counting argument has no integral meaning.
    """
    info = sorted(set(info))
    if i in info or j not in info:
        raise ValueError("i must be frozen and j an information index")
    w_min = min(row_weight(x, n) for x in info)
    if row_weight(i, n) != w_min or row_weight(j, n) != w_min:
        raise ValueError("both indices must have the minimum row weight")
    if j not in compute_k_set(i, info):
        raise ValueError(f"{j} is not in the k-set of {i}: swapping gives no guaranteed gain")
    k_i = len(compute_k_set(i, info))
    if k_i == 0:
        return None
    leaders = [x for x in info if row_weight(x, n) == w_min]
    covering = [x for x in leaders if j in compute_k_set(x, info)]
    gain = sum(1 << (len(compute_k_set(x, info)) - 1) for x in covering)
    gain += (1 << len(compute_k_set(j, info))) - (1 << (k_i - 1))
    return gain if gain > 0 else None


def merge_clears_coset(i: int, j: int, info: Iterable[int], n: int) -> bool:
    """Whether merging frozen ``j`` into min-weight leader ``i`` removes every min-weight codeword led by ``i``.

    Requires ``wt(g_i) = w_min`` over ``info`` and ``wt(g_j) >= w_min``. The
    answer is True unless ``i`` strictly precedes ``j`` in the universal
    partial order: every core and balancing row of a min-weight codeword in
    that coset lies above ``i``, so adding any other row ``g_j`` raises the weight.
    """
    info = set(info) | {i}
    w_min = min(row_weight(x, n) for x in info)
    if row_weight(i, n) != w_min:
        raise ValueError(f"row {i} does not have minimum weight {w_min}")
    if row_weight(j, n) < w_min:
        raise ValueError(f"row {j} is lighter than the minimum weight {w_min}")
    return i == j or not precedes(i, j)


def local_info_set(size: int, k: int) -> tuple[int, ...]:
    """RM profiling inside a ``G_size^T`` block: the ``k`` heaviest rows, ties to smaller index.

    Row ``r`` of ``G^T`` is column ``r`` of ``G``, of weight ``2**(m - |S_r|)``.
    """
    m = log2_int(size)
    if not 0 <= k <= size:
        raise ValueError(f"cannot place {k} information bits in a block of {size}")
    ranked = sorted(range(size), key=lambda r: (-(1 << (m - len(support(r)))), r))
    return tuple(sorted(ranked[:k]))


def rate_profile(reliability: Reliability, k0: int, layers: Sequence[tuple[int, int]] = ()) -> RateProfile:
    """Choose the base information set and the Type-I connection sets.

    ``layers`` lists ``(N_l, K_l)`` per Type-I block. The ``k0 + sum N_l``
    most reliable indices are split into connection indices, taken from the
    lightest row-weight stratum least-reliable first (moving to the doubled
    weight when a stratum runs out), and the remaining base information set.
    """
    N = reliability.length
    n = log2_int(N)
    layers = [(int(a), int(b)) for a, b in layers]
    for size, k in layers:
        if not is_power_of_two(size):
            raise ValueError(f"Type-I block size {size} is not a power of two")
        if size > N:
            raise ValueError(f"Type-I block exceeds N: {size} > {N}")
        if not 0 <= k <= size:
            raise ValueError(f"Type-I block ({size},{k}) needs 0 <= K_l <= N_l")
    n_p = sum(size for size, _ in layers)
    if k0 < 0 or k0 + n_p > N:
        raise ValueError(f"infeasible profile: K_0 + sum N_l = {k0 + n_p} exceeds N = {N}")

    selected = reliability.most_reliable(k0 + n_p)
    rank = reliability.rank()
    weights = {i: row_weight(i, n) for i in selected}
    aux: list[int] = []
    need = n_p
    w = min(weights.values()) if selected else 1
    while need > 0:
        stratum = sorted((i for i in selected if weights[i] == w), key=lambda i: rank[i])
        aux.extend(stratum[:need])
        need -= min(len(stratum), need)
        w *= 2
    info0 = sorted(set(selected) - set(aux))
    aux.sort()
    connections, layer_info = [], []
    start = 0
    for size, k in layers:
        connections.append(tuple(aux[start:start + size]))
        layer_info.append(local_info_set(size, k))
        start += size
    return RateProfile(n=n, info0=tuple(info0), connections=tuple(connections), layer_info=tuple(layer_info))


def _pair_rule(state: int, i: int, j: int, n: int, w_min: int) -> bool:
    if state == 0:
        return row_weight(j, n) >= w_min
    si, sj = support(i), support(j)
    # wt(g_i + g_j) = 2^|S_i| + 2^|S_j| - 2 * 2^|S_i & S_j|
    merged = (1 << len(si)) + (1 << len(sj)) - (2 << len(si & sj))
    return merged > w_min if state == 1 else merged == w_min


def select_type2_pairs(profile: RateProfile) -> MergedPairs:
    """Greedy row-merging pair selection over the min-weight rows of ``info0``.

    Three passes over the min-weight information indices in ascending order;
    each unpaired ``i`` takes the smallest eligible later frozen index ``j``
    satisfying the pass rule: ``wt(g_j) >= w_min``, then
    ``wt(g_i + g_j) > w_min``, then ``wt(g_i + g_j) = w_min``. Eligible
    indices are outside every connection set and the base information set and
    not yet part of any pair.
    """
    n = profile.n
    if not profile.info0:
        return MergedPairs()
    w_min = min(row_weight(i, n) for i in profile.info0)
    candidates = [i for i in profile.info0 if row_weight(i, n) == w_min]
    blocked = set(profile.info0) | profile.connection_union
    pairs: list[tuple[int, int]] = []
    for state in (0, 1, 2):
        for i in candidates:
            for j in range(i + 1, profile.N):
                if j in blocked:
                    continue
                if _pair_rule(state, i, j, n, w_min):
                    pairs.append((i, j))
                    blocked.add(j)
                    break
        paired = {i for i, _ in pairs}
        candidates = [i for i in candidates if i not in paired]
    return MergedPairs(tuple(pairs))
