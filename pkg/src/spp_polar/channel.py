"""BPSK over BI-AWGN and BEC channels and the Monte-Carlo block-error harness.

Every trial draws its message and noise from its own generator seeded by
``(master_seed, trial index)``, so a run gives the same record whatever the
batch size or number of worker processes.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .codec import CodeSpec, encode
from .decoder import LLR_CLAMP, scl_decode_batch

__all__ = [
    "ChannelConfig",
    "SimRecord",
    "SweepConfig",
    "channel_llr",
    "load_sweep_config",
    "results_csv",
    "run_sweep",
    "simulate_bler",
    "trial_rng",
]

DEFAULT_MIN_ERRORS = 100
DEFAULT_MAX_TRIALS = 10**6


@dataclass(frozen=True)
class ChannelConfig:
    """``kind="bi_awgn"`` with ``ebn0_db`` and code ``rate``, or ``kind="bec"`` with ``eps``."""

    kind: str
    ebn0_db: float | None = None
    rate: float | None = None
    eps: float | None = None

    def __post_init__(self):
        if self.kind == "bi_awgn":
            if self.ebn0_db is None or self.rate is None:
                raise ValueError("bi_awgn needs ebn0_db and rate")
            if not 0.0 < self.rate <= 1.0:
                raise ValueError(f"rate must lie in (0, 1], got {self.rate}")
            if not math.isfinite(self.ebn0_db):
                raise ValueError("ebn0_db must be finite")
        elif self.kind == "bec":
            if self.eps is None or not 0.0 <= self.eps <= 1.0:
                raise ValueError(f"bec needs eps in [0, 1], got {self.eps}")
        else:
            raise ValueError(f"unknown channel kind {self.kind!r}")

    @classmethod
    def awgn(cls, ebn0_db: float, rate: float) -> "ChannelConfig":
        return cls("bi_awgn", ebn0_db=float(ebn0_db), rate=float(rate))

    @classmethod
    def bec(cls, eps: float) -> "ChannelConfig":
        return cls("bec", eps=float(eps))

    @property
    def sigma2(self) -> float:
        if self.kind != "bi_awgn":
            raise AttributeError("noise variance is defined for bi_awgn only")
        return 1.0 / (2.0 * self.rate * 10.0 ** (self.ebn0_db / 10.0))

    @property
    def label(self) -> str:
        return f"bi_awgn(R={self.rate:g})" if self.kind == "bi_awgn" else f"bec(eps={self.eps:g})"


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([int(master_seed), int(trial)])


def channel_llr(x, config: ChannelConfig, rng: np.random.Generator) -> np.ndarray:
    """Channel LLRs for codeword bits ``x`` (any shape) sent with BPSK ``0 -> +1``."""
    x = np.asarray(x)
    s = 1.0 - 2.0 * x
    if config.kind == "bi_awgn":
        sigma2 = config.sigma2
        y = s + rng.normal(0.0, math.sqrt(sigma2), size=x.shape)
        return 2.0 * y / sigma2
    erased = rng.random(size=x.shape) < config.eps
    return np.where(erased, 0.0, s * LLR_CLAMP)


@dataclass(frozen=True)
class SimRecord:
    """Aggregate of one simulation point; ``wall_time`` is ignored in comparisons."""

    spec_id: str
    list_size: int
    channel: str
    ebn0_db: float | None
    trials: int
    errors: int
    e1: int | None
    e2: int | None
    seed: int
    genie: bool
    wall_time: float = field(default=0.0, compare=False)

    @property
    def bler(self) -> float:
        return self.errors / self.trials if self.trials else float("nan")

    def confidence_interval(self, z: float = 1.96) -> tuple[float, float]:
        """Wilson score interval for the block error rate."""
        n = self.trials
        if n == 0:
            return 0.0, 1.0
        p = self.errors / n
        denom = 1.0 + z * z / n
        centre = (p + z * z / (2 * n)) / denom
        half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
        return max(0.0, centre - half), min(1.0, centre + half)


def _run_trials(spec: CodeSpec, S: int, channel: ChannelConfig, seed: int, start: int, stop: int,
                genie: bool, exact: bool):
    """Decode trials ``start..stop-1``; returns per-trial error and E1 flags."""
    count = stop - start
    rngs = [trial_rng(seed, t) for t in range(start, stop)]
    msgs = np.array([rng.integers(0, 2, size=spec.k, dtype=np.uint8) for rng in rngs]).reshape(count, spec.k)
    x = encode(spec, msgs)
    llr = np.array([channel_llr(x[t], channel, rng) for t, rng in enumerate(rngs)]).reshape(count, spec.N)
    res = scl_decode_batch(spec, llr, S, genie_messages=msgs if genie else None, exact=exact)
    errors = (res.selected != msgs).any(axis=1)
    e1 = ~res.in_list if genie else np.zeros(count, dtype=bool)
    return errors, e1


def simulate_bler(
    spec: CodeSpec,
    S: int,
    channel: ChannelConfig,
    min_errors: int = DEFAULT_MIN_ERRORS,
    max_trials: int = DEFAULT_MAX_TRIALS,
    master_seed: int = 0,
    genie: bool = False,
    workers: int = 1,
    batch_size: int = 512,
    exact: bool = False,
    spec_id: str = "",
) -> SimRecord:
    """Count block errors until ``min_errors`` are seen or ``max_trials`` are run.

    The run stops exactly at the trial producing the ``min_errors``-th error,
    which keeps the record independent of ``batch_size`` and ``workers``.
    """
    if int(min_errors) < 1:
        raise ValueError(f"min_errors must be >= 1, got {min_errors}")
    if int(max_trials) < 1:
        raise ValueError(f"max_trials must be >= 1, got {max_trials}")
    if int(workers) < 1 or int(batch_size) < 1:
        raise ValueError("workers and batch_size must be >= 1")
    t0 = time.perf_counter()
    chunks = [(a, min(a + batch_size, max_trials)) for a in range(0, max_trials, batch_size)]
    trials = errors = e1 = 0
    done = False
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        pos = 0
        while pos < len(chunks) and not done:
            wave = chunks[pos:pos + (workers if pool else 1)]
            pos += len(wave)
            if pool:
                futures = [pool.submit(_run_trials, spec, S, channel, master_seed, a, b, genie, exact) for a, b in wave]
                results = [f.result() for f in futures]
            else:
                results = [_run_trials(spec, S, channel, master_seed, a, b, genie, exact) for a, b in wave]
            for err, ev1 in results:
                need = min_errors - errors
                hits = np.flatnonzero(err)
                if len(hits) >= need:
                    cut = hits[need - 1] + 1
                    err, ev1 = err[:cut], ev1[:cut]
                    done = True
                trials += len(err)
                errors += int(err.sum())
                e1 += int((err & ev1).sum())
                if done:
                    break
    finally:
        if pool:
            pool.shutdown(cancel_futures=True)
    return SimRecord(
        spec_id=spec_id or spec.family,
        list_size=int(S),
        channel=channel.label,
        ebn0_db=channel.ebn0_db,
        trials=trials,
        errors=errors,
        e1=e1 if genie else None,
        e2=errors - e1 if genie else None,
        seed=int(master_seed),
        genie=genie,
        wall_time=time.perf_counter() - t0,
    )


def results_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["spec_id", "S", "channel", "ebn0_db", "trials", "errors", "e1", "e2", "bler"])
    for r in records:
        writer.writerow([
            r.spec_id, r.list_size, r.channel, "" if r.ebn0_db is None else r.ebn0_db,
            r.trials, r.errors, "" if r.e1 is None else r.e1, "" if r.e2 is None else r.e2, repr(r.bler),
        ])
    return buf.getvalue()


@dataclass(frozen=True)
class SweepConfig:
    """A BLER sweep over Eb/N0 points, loadable from JSON."""

    spec_path: str
    list_size: int
    ebn0_db: tuple[float, ...]
    min_errors: int = DEFAULT_MIN_ERRORS
    max_trials: int = DEFAULT_MAX_TRIALS
    seed: int = 0
    genie: bool = False
    workers: int = 1
    spec_id: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ebn0_db"] = list(self.ebn0_db)
        return d


def load_sweep_config(path) -> SweepConfig:
    data = json.loads(Path(path).read_text())
    allowed = set(SweepConfig.__dataclass_fields__)
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown sweep config keys: {sorted(unknown)}")
    data["ebn0_db"] = tuple(float(v) for v in data["ebn0_db"])
    spec_path = Path(data["spec_path"])
    if not spec_path.is_absolute():
        data["spec_path"] = str(Path(path).parent / spec_path)
    return SweepConfig(**data)


def run_sweep(config: SweepConfig) -> list[SimRecord]:
    spec = CodeSpec.from_json(Path(config.spec_path).read_text())
    records = []
    for snr in config.ebn0_db:
        channel = ChannelConfig.awgn(snr, spec.rate)
        records.append(simulate_bler(
            spec, config.list_size, channel, config.min_errors, config.max_trials,
            config.seed, config.genie, config.workers, spec_id=config.spec_id or Path(config.spec_path).stem,
        ))
    return records
