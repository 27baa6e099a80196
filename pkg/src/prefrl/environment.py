"""Simulated user environments.

Three reward models are available:

* ``matrix_factorization``: biased MF fitted on a train log; the sampled
  user is the episode context and scores depend only on (user, action).
* ``sequential``: a next-item-trained copy of the sequence encoder, frozen;
  scores are dot(encoded history, item embedding).
* ``latent``: ground-truth latents from the synthetic generator; scores are
  dot(mean history latent, action latent).  This is the oracle-aligned
  environment used for directional experiments and tests.

Episodes start from a logged user (MF) or a logged initial item (the other
kinds), append the agent's action to the history each step, and end when the
reward falls below the quit threshold (the user abandons the session) or the
step horizon is reached.  Rewards are clipped to [0, r_max].
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .data import InteractionLog
from .encoder import EncoderConfig, encode, encode_backward, encode_with_cache, init_encoder_params
from .nn import ParamSet, optimizer_step, softmax

__all__ = [
    "EnvConfig",
    "EnvState",
    "MatrixFactorizationModel",
    "SequentialModel",
    "LatentPreferenceModel",
    "fit_reward_model",
    "score",
    "UserEnvironment",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EnvConfig:
    max_steps: int = 30
    quit_threshold: float = 0.75
    r_max: float = 5.0
    seed: int = 0

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if not 0.0 <= self.quit_threshold < self.r_max:
            raise ValueError("quit_threshold must lie in [0, r_max)")


@dataclass(frozen=True)
class EnvState:
    """Immutable per-episode state; step() returns a new one."""
    history: tuple[int, ...]
    user_id: str | None
    steps_taken: int
    done: bool


class MatrixFactorizationModel:
    """Biased MF over (user, item): dot(U_u, V_i) + b_u + b_i + b0, clipped."""

    kind = "matrix_factorization"

    def __init__(self, user_ids: list[str], user_factors, item_factors,
                 user_bias, item_bias, global_bias: float, r_max: float,
                 loss_history: list[float] | None = None):
        self.user_index = {u: i for i, u in enumerate(user_ids)}
        self.user_ids = list(user_ids)
        self.user_factors = np.asarray(user_factors, dtype=np.float64)
        self.item_factors = np.asarray(item_factors, dtype=np.float64)
        self.user_bias = np.asarray(user_bias, dtype=np.float64)
        self.item_bias = np.asarray(item_bias, dtype=np.float64)
        self.global_bias = float(global_bias)
        self.r_max = float(r_max)
        self.loss_history = loss_history or []

    @property
    def num_items(self) -> int:
        return self.item_factors.shape[0]

    def score(self, user_id: str, action: int) -> float:
        if user_id not in self.user_index:
            raise KeyError(f"unknown user {user_id!r}")
        u = self.user_index[user_id]
        raw = (self.user_factors[u] @ self.item_factors[action]
               + self.user_bias[u] + self.item_bias[action] + self.global_bias)
        return float(np.clip(raw, 0.0, self.r_max))


class SequentialModel:
    """Frozen next-item encoder; scores dot(encode(history), item embedding)."""

    kind = "sequential"

    def __init__(self, params: ParamSet, encoder_config: EncoderConfig,
                 r_max: float, loss_history: list[float] | None = None):
        self.params = params
        self.encoder_config = encoder_config
        self.r_max = float(r_max)
        self.loss_history = loss_history or []

    @property
    def num_items(self) -> int:
        return self.encoder_config.num_items

    def score(self, history, action: int) -> float:
        state = encode(history, self.params, self.encoder_config)
        raw = state @ self.params["item_emb"][action]
        return float(np.clip(raw, 0.0, self.r_max))


class LatentPreferenceModel:
    """Ground-truth scorer: dot(mean history latent, action latent), clipped.

    Aligned by construction with the synthetic judge, which ranks candidates
    with the same dot product.
    """

    kind = "latent"

    def __init__(self, item_latents, r_max: float, scale: float = 1.0):
        self.item_latents = np.asarray(item_latents, dtype=np.float64)
        self.r_max = float(r_max)
        self.scale = float(scale)

    @property
    def num_items(self) -> int:
        return self.item_latents.shape[0]

    def score(self, history, action: int) -> float:
        profile = self.item_latents[np.asarray(history, dtype=np.int64)].mean(axis=0)
        raw = self.scale * float(profile @ self.item_latents[action])
        return float(np.clip(raw, 0.0, self.r_max))


def score(reward_model, context, action: int) -> float:
    """Uniform scoring entry point: context is a user id for MF models and an
    item-id history for the other kinds."""
    return reward_model.score(context, action)


def _fit_matrix_factorization(log_: InteractionLog, num_items: int, d_rm: int,
                              epochs: int, lr: float, neg_per_pos: int,
                              r_max: float, rank_decay: float,
                              rng: np.random.Generator) -> MatrixFactorizationModel:
    """Seeded SGD on squared error over a fixed sample set.

    Positives are graded by their position in the user's sequence
    (``r_max * rank_decay**position``, sequences being preference-ordered;
    rank_decay=1 gives plain binary targets).  Negatives target 0 and are
    drawn once, from the user's unseen items, so the epoch loss descends a
    stationary objective.
    """
    user_ids = [seq.user_id for seq in log_.sequences]
    num_users = len(user_ids)
    u_f = 0.1 * rng.standard_normal((num_users, d_rm))
    i_f = 0.1 * rng.standard_normal((num_items, d_rm))
    u_b = np.zeros(num_users)
    i_b = np.zeros(num_items)
    b0 = 0.0

    samples: list[tuple[int, int, float]] = []
    all_items = np.arange(num_items)
    for u, seq in enumerate(log_.sequences):
        unseen = np.setdiff1d(all_items, np.asarray(seq.items, dtype=np.int64))
        for position, item in enumerate(seq.items):
            samples.append((u, item, r_max * rank_decay ** position))
            if unseen.size:
                for neg in rng.choice(unseen, size=neg_per_pos):
                    samples.append((u, int(neg), 0.0))
    loss_history = []
    for _ in range(epochs):
        order = rng.permutation(len(samples))
        total = 0.0
        for idx in order:
            u, item, target = samples[idx]
            pred = u_f[u] @ i_f[item] + u_b[u] + i_b[item] + b0
            err = pred - target
            total += err * err
            g = 2.0 * err
            u_row = u_f[u].copy()
            u_f[u] -= lr * g * i_f[item]
            i_f[item] -= lr * g * u_row
            u_b[u] -= lr * g
            i_b[item] -= lr * g
            b0 -= lr * g
        loss_history.append(total / len(samples))
    return MatrixFactorizationModel(user_ids, u_f, i_f, u_b, i_b, b0, r_max, loss_history)


def _fit_sequential(log_: InteractionLog, num_items: int, d_rm: int,
                    max_seq_len: int, epochs: int, lr: float, r_max: float,
                    rng: np.random.Generator) -> SequentialModel:
    """Train the encoder next-item style (cross-entropy over all items, output
    embeddings tied to the input item embeddings), then freeze it."""
    config = EncoderConfig(num_items=num_items, embed_dim=d_rm, max_seq_len=max_seq_len)
    params = ParamSet(init_encoder_params(config, rng))
    pairs = []
    for seq in log_.sequences:
        for t in range(1, len(seq.items)):
            pairs.append((seq.items[:t], seq.items[t]))
    loss_history = []
    for _ in range(epochs):
        order = rng.permutation(len(pairs))
        total = 0.0
        for idx in order:
            prefix, target = pairs[idx]
            state, cache = encode_with_cache(prefix, params, config)
            item_emb = params["item_emb"][:num_items]
            probs = softmax(item_emb @ state)
            total += -float(np.log(max(probs[target], 1e-12)))
            d_logits = probs.copy()
            d_logits[target] -= 1.0
            params.grads["item_emb"][:num_items] += np.outer(d_logits, state)
            d_state = item_emb.T @ d_logits
            encode_backward(cache, d_state, params)
            optimizer_step(params, lr)
        loss_history.append(total / len(pairs))
    return SequentialModel(params, config, r_max, loss_history)


def fit_reward_model(log_: InteractionLog, kind: str, num_items: int, *,
                     d_rm: int = 8, epochs: int = 40, lr: float = 0.01,
                     neg_per_pos: int = 2, rank_decay: float = 0.7,
                     max_seq_len: int = 10, r_max: float = 5.0, seed: int = 0):
    """Fit a reward model of the requested kind on a train-split log."""
    if log_.num_sequences == 0:
        raise ValueError("cannot fit a reward model on an empty log")
    rng = np.random.default_rng(seed)
    if kind == "matrix_factorization":
        return _fit_matrix_factorization(log_, num_items, d_rm, epochs, lr,
                                         neg_per_pos, r_max, rank_decay, rng)
    if kind == "sequential":
        return _fit_sequential(log_, num_items, d_rm, max_seq_len, epochs, lr, r_max, rng)
    raise ValueError(f"unknown reward model kind {kind!r}")


class UserEnvironment:
    """Episode lifecycle over a frozen reward model and a log split.

    The environment object is immutable apart from its reset rng; states are
    value objects, so parallel rollouts can share one environment as long as
    each worker owns its own states (or passes explicit reset seeds).
    """

    def __init__(self, reward_model, log_: InteractionLog, config: EnvConfig):
        if log_.num_sequences == 0:
            raise ValueError("environment needs a nonempty log for initial states")
        self.reward_model = reward_model
        self.log = log_
        self.config = config
        self._rng = np.random.default_rng(config.seed)

    @property
    def num_items(self) -> int:
        return self.reward_model.num_items

    def reset(self, seed: int | None = None) -> EnvState:
        """Sample an initial state: a logged user's first item (MF keeps the
        user as context; the other kinds keep only the item)."""
        rng = self._rng if seed is None else np.random.default_rng(seed)
        seq = self.log.sequences[int(rng.integers(self.log.num_sequences))]
        user_id = seq.user_id if self.reward_model.kind == "matrix_factorization" else None
        return EnvState(history=(seq.items[0],), user_id=user_id,
                        steps_taken=0, done=False)

    def step(self, state: EnvState, action: int) -> tuple[float, EnvState, bool]:
        """Score the action, append it to the history, and apply the quit rule."""
        if state.done:
            raise RuntimeError("cannot step a finished episode")
        if not 0 <= action < self.num_items:
            raise ValueError(f"action {action} out of range [0, {self.num_items})")
        context = state.user_id if self.reward_model.kind == "matrix_factorization" else state.history
        reward = self.reward_model.score(context, action)
        steps = state.steps_taken + 1
        done = reward < self.config.quit_threshold or steps >= self.config.max_steps
        next_state = EnvState(history=state.history + (action,), user_id=state.user_id,
                              steps_taken=steps, done=done)
        return reward, next_state, done
