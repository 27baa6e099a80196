"""Sequence state encoder: item + position embeddings through one block of
causal single-head self-attention with a residual connection.

The encoder maps an interacted-item sequence to a fixed-size state vector.
Sequences longer than ``max_seq_len`` keep only their most recent items.
Conceptually shorter sequences are left-padded with a reserved padding id
(``num_items``) that is masked out of attention; because masked positions
contribute nothing, the implementation simply computes over the real items,
placing them in the trailing position slots (the most recent item always
occupies the last slot).  The state is the block output at that last slot.

Projection matrices are initialized to identity plus small noise so that
tiny instances can be checked by hand; gradients are derived analytically
in :func:`encode_backward` and verified against finite differences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .nn import ParamSet

__all__ = [
    "EncoderConfig",
    "ENCODER_PARAM_NAMES",
    "init_encoder_params",
    "encode",
    "encode_with_cache",
    "encode_backward",
    "encode_batch",
]

ENCODER_PARAM_NAMES = ("item_emb", "pos_emb", "w_q", "w_k", "w_v")


@dataclass(frozen=True)
class EncoderConfig:
    num_items: int
    embed_dim: int = 64
    max_seq_len: int = 10

    def __post_init__(self):
        if self.num_items < 2:
            raise ValueError("num_items must be >= 2")
        if self.embed_dim < 2:
            raise ValueError("embed_dim must be >= 2")
        if self.max_seq_len < 1:
            raise ValueError("max_seq_len must be >= 1")

    @property
    def padding_id(self) -> int:
        return self.num_items


def init_encoder_params(config: EncoderConfig, rng: np.random.Generator,
                        proj_noise: float = 0.01) -> dict[str, np.ndarray]:
    """Seeded initial tensors: uniform(-0.1, 0.1) embeddings (one extra row
    for the padding id) and identity-plus-noise projections."""
    d = config.embed_dim
    eye = np.eye(d)
    return {
        "item_emb": rng.uniform(-0.1, 0.1, size=(config.num_items + 1, d)),
        "pos_emb": rng.uniform(-0.1, 0.1, size=(config.max_seq_len, d)),
        "w_q": eye + proj_noise * rng.standard_normal((d, d)),
        "w_k": eye + proj_noise * rng.standard_normal((d, d)),
        "w_v": eye + proj_noise * rng.standard_normal((d, d)),
    }


def _prepare_ids(sequence, config: EncoderConfig) -> np.ndarray:
    ids = np.asarray(sequence, dtype=np.int64)
    if ids.ndim != 1 or ids.size == 0:
        raise ValueError("cannot encode an empty sequence")
    bad = (ids < 0) | (ids >= config.num_items)
    if bad.any():
        raise ValueError(f"item id {int(ids[bad][0])} out of range [0, {config.num_items})")
    if ids.size > config.max_seq_len:
        ids = ids[-config.max_seq_len:]
    return ids


def _forward(ids: np.ndarray, params: ParamSet, config: EncoderConfig):
    n, d = config.max_seq_len, config.embed_dim
    L = ids.size
    # real items occupy the trailing slots n-L .. n-1
    x = params["item_emb"][ids] + params["pos_emb"][n - L:]
    scale = 1.0 / math.sqrt(d)
    q = x @ params["w_q"]
    k = x @ params["w_k"]
    v = x @ params["w_v"]
    scores = (q @ k.T) * scale
    causal = np.triu(np.ones((L, L), dtype=bool), k=1)  # True where key is in the future
    scores = np.where(causal, -np.inf, scores)
    scores -= scores.max(axis=1, keepdims=True)
    attn = np.exp(scores)
    attn /= attn.sum(axis=1, keepdims=True)
    out = attn @ v
    h = x + out
    cache = {"ids": ids, "x": x, "q": q, "k": k, "v": v, "attn": attn,
             "scale": scale, "pos_start": n - L}
    return h[-1], cache


def encode(sequence, params: ParamSet, config: EncoderConfig) -> np.ndarray:
    """State vector for one item-id sequence (most recent item last)."""
    ids = _prepare_ids(sequence, config)
    state, _ = _forward(ids, params, config)
    return state


def encode_with_cache(sequence, params: ParamSet, config: EncoderConfig):
    """Like :func:`encode` but also returns the forward cache needed by
    :func:`encode_backward`."""
    ids = _prepare_ids(sequence, config)
    return _forward(ids, params, config)


def encode_backward(cache: dict, d_state: np.ndarray, params: ParamSet) -> None:
    """Accumulate gradients of ``dot(d_state, encode(...))`` into ``params.grads``."""
    x, q, k, v, attn = cache["x"], cache["q"], cache["k"], cache["v"], cache["attn"]
    scale = cache["scale"]
    L = x.shape[0]

    d_h = np.zeros_like(x)
    d_h[-1] = d_state
    d_x = d_h.copy()          # residual branch
    d_out = d_h               # attention branch

    d_attn = d_out @ v.T
    d_v = attn.T @ d_out
    # softmax rows: masked entries have attn == 0, so their dS vanishes
    d_scores = attn * (d_attn - np.sum(d_attn * attn, axis=1, keepdims=True))
    d_q = (d_scores @ k) * scale
    d_k = (d_scores.T @ q) * scale

    d_x += d_q @ params["w_q"].T + d_k @ params["w_k"].T + d_v @ params["w_v"].T

    grads = params.grads
    grads["w_q"] += x.T @ d_q
    grads["w_k"] += x.T @ d_k
    grads["w_v"] += x.T @ d_v
    grads["pos_emb"][cache["pos_start"]:] += d_x
    np.add.at(grads["item_emb"], cache["ids"], d_x)


def encode_batch(sequences, params: ParamSet, config: EncoderConfig) -> list[np.ndarray]:
    """Elementwise identical to mapping :func:`encode` over the list."""
    return [encode(seq, params, config) for seq in sequences]
