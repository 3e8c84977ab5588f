"""Weight spectra, union bound, path-metric ranges and SCL error-event splits."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .channel import channel_llr, trial_rng
from .codec import CodeSpec, encode
from .construction import min_weight_lower_bound
from .decoder import scl_decode_batch
from .polar_core import polar_transform

__all__ = [
    "MinWeightEstimate",
    "PathTrace",
    "WeightSpectrum",
    "coset_weight_counts",
    "error_event_split",
    "min_weight_lower_bound_report",
    "min_weight_estimate_scl",
    "path_metric_range",
    "pmr_csv",
    "pmr_traces",
    "q_function",
    "union_bound",
    "weight_spectrum_exhaustive",
]

EXHAUSTIVE_MAX_K = 28
# bytes per surviving path and codeword bit, with head-room for the pruning copies
_SCL_BYTES_PER_PATH_BIT = 48


@dataclass(frozen=True)
class WeightSpectrum:
    """Weight distribution ``{d: A_d}``; ``list_size`` is set for SCL estimates."""

    counts: dict[int, int]
    exact: bool = True
    list_size: int | None = None

    @property
    def d_min(self) -> int | None:
        nonzero = [d for d, a in self.counts.items() if d > 0 and a > 0]
        return min(nonzero) if nonzero else None

    @property
    def a_dmin(self) -> int:
        d = self.d_min
        return 0 if d is None else self.counts[d]

    @property
    def label(self) -> str:
        return "exact" if self.exact else f"estimated(S={self.list_size})"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {self.label}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["weight", "count"])
        for d in sorted(self.counts):
            writer.writerow([d, self.counts[d]])
        return buf.getvalue()


@dataclass(frozen=True)
class MinWeightEstimate:
    d_min: int | None
    count: int
    list_size: int

    def as_spectrum(self) -> WeightSpectrum:
        counts = {0: 1}
        if self.d_min is not None:
            counts[self.d_min] = self.count
        return WeightSpectrum(counts, exact=False, list_size=self.list_size)


def _generator_rows(spec: CodeSpec) -> np.ndarray:
    return encode(spec, np.eye(spec.k, dtype=np.uint8))


def _pack(codewords: np.ndarray) -> np.ndarray:
    packed = np.packbits(codewords, axis=-1)
    pad = (-packed.shape[-1]) % 8
    if pad:
        packed = np.concatenate([packed, np.zeros(packed.shape[:-1] + (pad,), dtype=np.uint8)], axis=-1)
    return packed.view(np.uint64)


def _span(rows: np.ndarray) -> np.ndarray:
    """All ``2**len(rows)`` combinations of packed rows, index bits selecting rows."""
    out = np.zeros((1,) + rows.shape[1:], dtype=rows.dtype)
    for row in rows:
        out = np.concatenate([out, out ^ row], axis=0)
    return out


def weight_spectrum_exhaustive(spec: CodeSpec, max_k: int = EXHAUSTIVE_MAX_K, chunk: int = 1 << 22) -> WeightSpectrum:
    """Exact weight distribution by enumerating all ``2**K`` codewords.

    The generator rows are split into two halves whose spans are tabulated;
    every codeword is the XOR of one entry of each table.
    """
    if spec.k > max_k:
        raise ValueError(f"K = {spec.k} exceeds the exhaustive enumeration guard {max_k}")
    if spec.k == 0:
        return WeightSpectrum({0: 1})
    rows = _pack(_generator_rows(spec))
    k1 = (spec.k + 1) // 2
    low, high = _span(rows[:k1]), _span(rows[k1:])
    hist = np.zeros(spec.N + 1, dtype=np.int64)
    step = max(1, chunk // len(low))
    for start in range(0, len(high), step):
        block = high[start:start + step, None, :] ^ low[None, :, :]
        w = np.bitwise_count(block).sum(axis=-1, dtype=np.int64)
        hist += np.bincount(w.ravel(), minlength=spec.N + 1)
    return WeightSpectrum({int(d): int(a) for d, a in enumerate(hist) if a})


def min_weight_estimate_scl(spec: CodeSpec, S: int, memory_limit: float = 2.5e9) -> MinWeightEstimate:
    """Estimate ``(d_min, A_dmin)`` from the final list of SCL run on the noiseless all-zero word.

    With all channel LLRs equal to one, a path's metric is the weight of its
    partial codeword, so the list collects light codewords; with a CRC only
    the passing list entries count. The reported
    weight can only overestimate ``d_min`` and the count underestimates the
    number of codewords of that weight.
    """
    S = int(S)
    if S < 2:
        raise ValueError(f"list size must be >= 2, got {S}")
    need = S * spec.N * _SCL_BYTES_PER_PATH_BIT
    if need > memory_limit:
        raise MemoryError(f"list size {S} needs about {need / 1e9:.1f} GB, above the {memory_limit / 1e9:.1f} GB guard")
    res = scl_decode_batch(spec, np.ones((1, spec.N)), S)
    w = res.codewords[0].sum(axis=-1, dtype=np.int64)
    # payloads failing the CRC are not codewords
    w = w[(w > 0) & res.crc_pass[0]]
    if not len(w):
        return MinWeightEstimate(None, 0, S)
    d = int(w.min())
    return MinWeightEstimate(d, int((w == d).sum()), S)


def coset_weight_counts(spec: CodeSpec, weight: int, max_k: int = 20) -> dict[int, int]:
    """Codewords of the given weight grouped by the first nonzero ``u`` index (coset leader)."""
    if spec.k > max_k:
        raise ValueError(f"K = {spec.k} exceeds the coset enumeration guard {max_k}")
    msgs = ((np.arange(1 << spec.k)[:, None] >> np.arange(spec.k)) & 1).astype(np.uint8)
    u = spec.pretransform.apply(spec.place(msgs))
    w = polar_transform(u).sum(axis=-1)
    sel = (w == weight) & u.any(axis=-1)
    leaders = np.argmax(u[sel] == 1, axis=-1)
    idx, cnt = np.unique(leaders, return_counts=True)
    return {int(i): int(c) for i, c in zip(idx, cnt)}


def min_weight_lower_bound_report(spec: CodeSpec) -> str:
    """Text summary of the coset lower bound over the u-domain information set."""
    info = set(spec.profile.info0) | spec.profile.connection_union
    report = min_weight_lower_bound(info, spec.n)
    lines = [f"# coset lower bound: w_min={report.w_min} total={report.total}", "leader,k_size,count"]
    lines += [f"{i},{k},{1 << k}" for i, k in sorted(report.k_sizes.items())]
    return "\n".join(lines) + "\n"


def q_function(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def union_bound(spectrum: WeightSpectrum, rate: float, ebn0_db: Iterable[float]) -> list[float]:
    """``sum_d A_d Q(sqrt(2 d R Eb/N0))`` over the nonzero weights, per SNR point."""
    out = []
    for snr in ebn0_db:
        ebn0 = 10.0 ** (snr / 10.0)
        out.append(sum(a * q_function(math.sqrt(2.0 * d * rate * ebn0)) for d, a in spectrum.counts.items() if d > 0))
    return out


@dataclass
class PathTrace:
    """Path metrics of the surviving paths after every decoding step.

    ``metrics`` has shape ``(N, S)``, with NaN in slots of unborn paths.
    """

    metrics: np.ndarray
    spec_id: str = ""
    list_size: int = 0

    @property
    def pmr(self) -> np.ndarray:
        """Per-step spread between the worst and best surviving path."""
        return np.nanmax(self.metrics, axis=1) - np.nanmin(self.metrics, axis=1)


def pmr_traces(spec: CodeSpec, S: int, channel, noises: int, seed: int = 0, spec_id: str = "") -> list[PathTrace]:
    """Decode ``noises`` random transmissions with tracing on, one trace each."""
    rngs = [trial_rng(seed, t) for t in range(noises)]
    msgs = np.array([rng.integers(0, 2, size=spec.k, dtype=np.uint8) for rng in rngs]).reshape(noises, spec.k)
    x = encode(spec, msgs)
    llr = np.array([channel_llr(x[t], channel, rng) for t, rng in enumerate(rngs)]).reshape(noises, spec.N)
    res = scl_decode_batch(spec, llr, S, trace=True)
    return [PathTrace(res.trace[b], spec_id=spec_id, list_size=S) for b in range(noises)]


def path_metric_range(traces: Sequence[PathTrace]) -> np.ndarray:
    """Mean path-metric range per step over a collection of traces."""
    if not traces:
        raise ValueError("no traces given")
    keys = {(t.spec_id, t.list_size, t.metrics.shape[0]) for t in traces}
    if len(keys) != 1:
        raise ValueError(f"traces come from different codes or list sizes: {sorted(keys)}")
    return np.mean([t.pmr for t in traces], axis=0)


def pmr_csv(mean_pmr: np.ndarray) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["step", "mean_pmr"])
    for i, value in enumerate(mean_pmr):
        writer.writerow([i, repr(float(value))])
    return buf.getvalue()


def error_event_split(record) -> tuple[float, float, float]:
    """``(P_E1, P_E2, P_E)`` from a genie-aided simulation record."""
    if not getattr(record, "genie", False) or record.e1 is None or record.e2 is None:
        raise ValueError("error event split needs a genie-aided simulation")
    if record.e1 + record.e2 != record.errors:
        raise ValueError("E1 and E2 counts do not partition the block errors")
    if record.trials == 0:
        return 0.0, 0.0, 0.0
    return record.e1 / record.trials, record.e2 / record.trials, record.errors / record.trials
