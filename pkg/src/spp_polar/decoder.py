"""Successive cancellation list decoding of pre-transformed polar codes.

The decoder runs over the u-domain and keeps the v-domain prefix of every
path, so a frozen ``v_i = 0`` turns into the dynamic constraint
``u_i = sum_{k<i} T[k, i] v_k``. A batch of received frames is decoded in
lock-step: all arrays carry a leading frame axis and a path axis.

Node LLRs use the min-sum ``f`` and exact ``g`` updates. The path metric adds
``|llr|`` whenever the chosen bit disagrees with the LLR sign; the exact
``ln(1 + exp(-(1 - 2u) llr))`` update is available through ``exact=True``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec import CodeSpec

LLR_CLAMP = 1e6

__all__ = ["LLR_CLAMP", "BatchDecodeResult", "DecodeResult", "scl_decode", "scl_decode_batch"]


@dataclass
class DecodeResult:
    """Outcome of decoding one frame.

    ``messages``/``metrics``/``codewords`` describe the final list (lower
    metric is better); ``selected`` is the chosen message. ``in_list`` is set
    only in genie mode. ``trace[i]`` holds the metrics of the paths alive
    after step ``i``.
    """

    messages: np.ndarray
    metrics: np.ndarray
    codewords: np.ndarray
    crc_pass: np.ndarray
    selected_index: int
    in_list: bool | None = None
    trace: list[np.ndarray] | None = None

    @property
    def selected(self) -> np.ndarray:
        return self.messages[self.selected_index]

    @property
    def selected_codeword(self) -> np.ndarray:
        return self.codewords[self.selected_index]


@dataclass
class BatchDecodeResult:
    """Outcome of decoding ``B`` frames with a common final list length ``P``.

    ``trace`` has shape ``(B, N, S)`` with NaN in slots of paths not yet born.
    """

    messages: np.ndarray  # (B, P, K)
    metrics: np.ndarray  # (B, P)
    codewords: np.ndarray  # (B, P, N)
    crc_pass: np.ndarray  # (B, P)
    selected_index: np.ndarray  # (B,)
    in_list: np.ndarray | None = None  # (B,)
    trace: np.ndarray | None = None

    @property
    def selected(self) -> np.ndarray:
        return np.take_along_axis(self.messages, self.selected_index[:, None, None], axis=1)[:, 0]

    def frame(self, b: int) -> DecodeResult:
        trace = None
        if self.trace is not None:
            trace = [row[~np.isnan(row)] for row in self.trace[b]]
        return DecodeResult(
            messages=self.messages[b],
            metrics=self.metrics[b],
            codewords=self.codewords[b],
            crc_pass=self.crc_pass[b],
            selected_index=int(self.selected_index[b]),
            in_list=None if self.in_list is None else bool(self.in_list[b]),
            trace=trace,
        )


def _f(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def _g(a: np.ndarray, b: np.ndarray, left: np.ndarray) -> np.ndarray:
    return b + (1.0 - 2.0 * left) * a


def _gather(arr: np.ndarray, parent: np.ndarray) -> np.ndarray:
    if arr.ndim == 2:
        return np.take_along_axis(arr, parent, axis=1)
    return np.take_along_axis(arr, parent[:, :, None], axis=1)


def _penalty(llr: np.ndarray, bit: np.ndarray | int, exact: bool) -> np.ndarray:
    if exact:
        return np.logaddexp(0.0, -(1.0 - 2.0 * bit) * llr)
    return np.where((llr < 0) != (np.asarray(bit) == 1), np.abs(llr), 0.0)


def scl_decode_batch(
    spec: CodeSpec,
    llr,
    S: int,
    genie_messages=None,
    trace: bool = False,
    exact: bool = False,
) -> BatchDecodeResult:
    """Decode a batch of channel LLR vectors ``(B, N)`` with list size ``S``.

    Pruning keeps the ``S`` best candidates under a stable sort of
    ``(metric, candidate index)`` with candidates ordered by
    ``(parent path, bit)``; survivors keep their candidate order.
    """
    S = int(S)
    if S < 1:
        raise ValueError(f"list size must be >= 1, got {S}")
    N, n = spec.N, spec.n
    llr = np.asarray(llr, dtype=float)
    if llr.ndim != 2 or llr.shape[1] != N:
        raise ValueError(f"expected LLRs of shape (B, {N}), got {llr.shape}")
    llr = np.clip(np.nan_to_num(llr, nan=0.0, posinf=LLR_CLAMP, neginf=-LLR_CLAMP), -LLR_CLAMP, LLR_CLAMP)
    B = llr.shape[0]

    frozen = spec.frozen_mask
    columns = spec.pretransform.columns
    v_true = None
    if genie_messages is not None:
        v_true = spec.place(np.asarray(genie_messages, dtype=np.uint8).reshape(B, spec.k))

    # alpha[d]: LLRs of the current node at depth d, length 2**(n - d)
    alpha: list[np.ndarray] = [llr[:, None, :]] + [None] * n
    # left[d]: codeword of the finished left child at depth d
    left: list[np.ndarray | None] = [None] * (n + 1)
    pm = np.zeros((B, 1))
    vhat = np.zeros((B, 1, N), dtype=np.uint8)
    alive = np.ones((B, 1), dtype=bool) if v_true is not None else None
    trace_arr = np.full((B, N, S), np.nan) if trace else None
    root = None

    for i in range(N):
        # descend from the deepest node shared with leaf i - 1
        if i == 0:
            start = 0
        else:
            tz = (i & -i).bit_length() - 1
            start = n - 1 - tz
            a = alpha[start]
            h = a.shape[-1] // 2
            alpha[start + 1] = _g(a[..., :h], a[..., h:], left[start + 1])
            start += 1
        for d in range(start, n):
            a = alpha[d]
            h = a.shape[-1] // 2
            alpha[d + 1] = _f(a[..., :h], a[..., h:])
        lam = np.broadcast_to(alpha[n][..., 0], pm.shape)

        rows = columns[i]
        if len(rows):
            s = (vhat[:, :, rows].sum(axis=-1) & 1).astype(np.uint8)
        else:
            s = np.zeros(pm.shape, dtype=np.uint8)

        if frozen[i]:
            u = s
            pm = pm + _penalty(lam, u, exact)
            vbit = np.zeros_like(s)
        else:
            P = pm.shape[1]
            cand = np.stack([pm + _penalty(lam, 0, exact), pm + _penalty(lam, 1, exact)], axis=-1).reshape(B, 2 * P)
            if 2 * P <= S:
                keep = np.broadcast_to(np.arange(2 * P), (B, 2 * P))
            else:
                keep = np.sort(np.argsort(cand, axis=1, kind="stable")[:, :S], axis=1)
            parent = keep // 2
            u = (keep % 2).astype(np.uint8)
            pm = np.take_along_axis(cand, keep, axis=1)
            s = np.take_along_axis(s, parent, axis=1)
            vbit = u ^ s
            for d in range(1, n + 1):
                if alpha[d] is not None:
                    alpha[d] = _gather(np.broadcast_to(alpha[d], (B, P) + alpha[d].shape[2:]), parent)
                if left[d] is not None:
                    left[d] = _gather(left[d], parent)
            vhat = _gather(vhat, parent)
            if alive is not None:
                alive = np.take_along_axis(alive, parent, axis=1)
        vhat[:, :, i] = vbit
        if alive is not None:
            alive = alive & (vbit == v_true[:, i:i + 1])

        # propagate partial sums upward
        c = u[:, :, None]
        d = n
        while d > 0 and (i >> (n - d)) & 1:
            c = np.concatenate([left[d] ^ c, c], axis=-1)
            d -= 1
        if d > 0:
            left[d] = c
        else:
            root = c
        if trace_arr is not None:
            trace_arr[:, i, :pm.shape[1]] = pm

    payload = vhat[:, :, spec.payload_positions]
    messages = payload[:, :, spec.message_slots]
    crc_pass = spec.crc_ok(payload)
    masked = np.where(crc_pass, pm, np.inf)
    best_crc = np.argmin(masked, axis=1)
    best_any = np.argmin(pm, axis=1)
    selected = np.where(crc_pass.any(axis=1), best_crc, best_any)
    in_list = None
    if alive is not None:
        in_list = alive.any(axis=1)
    return BatchDecodeResult(
        messages=messages,
        metrics=pm,
        codewords=root,
        crc_pass=crc_pass,
        selected_index=selected,
        in_list=in_list,
        trace=trace_arr,
    )


def scl_decode(spec: CodeSpec, llr, S: int, genie_message=None, trace: bool = False, exact: bool = False) -> DecodeResult:
    """Decode one received LLR vector of length ``N`` with list size ``S``."""
    llr = np.asarray(llr, dtype=float)
    if llr.ndim != 1 or llr.shape[0] != spec.N:
        raise ValueError(f"expected {spec.N} LLRs, got shape {llr.shape}")
    genie = None if genie_message is None else np.asarray(genie_message)[None, :]
    return scl_decode_batch(spec, llr[None, :], S, genie_messages=genie, trace=trace, exact=exact).frame(0)
