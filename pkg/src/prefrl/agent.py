"""Actor-critic recommendation agent.

One bundle holds the sequence encoder plus two affine heads over the state:
the actor (softmax over all items) and the critic (one Q estimate per item,
indexed by the taken action).  Losses follow the usual one-step temporal
difference scheme: the TD error doubles as the advantage that scales the
actor's log-probability loss, and is treated as a constant in actor
gradients.  The bootstrap target is likewise held constant in critic
gradients (semi-gradient TD); terminal transitions drop the bootstrap term.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .encoder import EncoderConfig, encode, encode_backward, encode_with_cache, init_encoder_params
from .nn import ParamSet, optimizer_step, softmax

__all__ = [
    "AgentBundle",
    "Transition",
    "init_agent",
    "action_distribution",
    "q_values",
    "critic_loss",
    "advantage",
    "actor_loss",
    "update",
]

LOG_PROB_FLOOR = -30.0


@dataclass(frozen=True)
class Transition:
    state_items: tuple[int, ...]
    action: int
    reward: float
    next_state_items: tuple[int, ...]
    done: bool


@dataclass
class AgentBundle:
    """Encoder + actor head + critic head and the discount factor."""

    params: ParamSet
    encoder_config: EncoderConfig
    gamma: float

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")

    @property
    def num_items(self) -> int:
        return self.encoder_config.num_items

    def clone(self) -> "AgentBundle":
        return AgentBundle(self.params.copy(), self.encoder_config, self.gamma)


def init_agent(num_items: int, embed_dim: int = 64, max_seq_len: int = 10,
               gamma: float = 0.9, seed: int = 0) -> AgentBundle:
    """Seeded agent: encoder init per the encoder module, heads uniform(-0.1, 0.1)
    with zero biases."""
    rng = np.random.default_rng(seed)
    config = EncoderConfig(num_items=num_items, embed_dim=embed_dim, max_seq_len=max_seq_len)
    tensors = init_encoder_params(config, rng)
    tensors["actor_w"] = rng.uniform(-0.1, 0.1, size=(embed_dim, num_items))
    tensors["actor_b"] = np.zeros(num_items)
    tensors["critic_w"] = rng.uniform(-0.1, 0.1, size=(embed_dim, num_items))
    tensors["critic_b"] = np.zeros(num_items)
    return AgentBundle(ParamSet(tensors), config, gamma)


def action_distribution(state: np.ndarray, bundle: AgentBundle) -> np.ndarray:
    """Softmax of the actor logits for one state vector."""
    logits = state @ bundle.params["actor_w"] + bundle.params["actor_b"]
    return softmax(logits)


def q_values(state: np.ndarray, bundle: AgentBundle) -> np.ndarray:
    """Raw per-item critic outputs for one state vector (no squashing)."""
    q = state @ bundle.params["critic_w"] + bundle.params["critic_b"]
    if not np.all(np.isfinite(q)):
        raise ValueError("critic produced non-finite values")
    return q


def policy_for(bundle: AgentBundle, items) -> np.ndarray:
    """Action distribution for an item-id history."""
    return action_distribution(encode(items, bundle.params, bundle.encoder_config), bundle)


def q_for(bundle: AgentBundle, items) -> np.ndarray:
    return q_values(encode(items, bundle.params, bundle.encoder_config), bundle)


def log_prob(dist: np.ndarray, action: int) -> float:
    """log pi(a|s) clamped at LOG_PROB_FLOOR to avoid -inf on collapsed policies."""
    p = float(dist[action])
    if p <= 0.0:
        return LOG_PROB_FLOOR
    return max(math.log(p), LOG_PROB_FLOOR)


def td_target(transition: Transition, bundle: AgentBundle,
              target: AgentBundle | None = None) -> float:
    """r + gamma * max_a' Q(s', a'), with a zero bootstrap on terminal transitions.

    The value is treated as a constant in all gradients.  By default the live
    critic evaluates the bootstrap; passing ``target`` (a frozen snapshot)
    evaluates it there instead, which tames the bootstrap feedback loop on
    long runs.
    """
    if transition.done:
        return float(transition.reward)
    q_next = q_for(target if target is not None else bundle, transition.next_state_items)
    return float(transition.reward) + bundle.gamma * float(q_next.max())


def selected_q(transition: Transition, bundle: AgentBundle) -> float:
    return float(q_for(bundle, transition.state_items)[transition.action])


def advantage(transition: Transition, bundle: AgentBundle) -> float:
    """TD error r + gamma * max Q(s', .) - Q(s, a)."""
    return td_target(transition, bundle) - selected_q(transition, bundle)


def critic_loss(transition: Transition, bundle: AgentBundle) -> float:
    """Squared one-step TD error."""
    return advantage(transition, bundle) ** 2


def actor_loss(transition: Transition, bundle: AgentBundle) -> float:
    """-log pi(a|s) scaled by the advantage (advantage held constant)."""
    dist = policy_for(bundle, transition.state_items)
    return -log_prob(dist, transition.action) * advantage(transition, bundle)


def backprop_heads(bundle: AgentBundle, state: np.ndarray, cache: dict,
                   d_actor_logits: np.ndarray | None = None,
                   d_q: np.ndarray | None = None) -> None:
    """Accumulate head gradients and push the combined state gradient
    through the encoder."""
    params = bundle.params
    grads = params.grads
    d_state = np.zeros_like(state)
    if d_actor_logits is not None:
        grads["actor_w"] += np.outer(state, d_actor_logits)
        grads["actor_b"] += d_actor_logits
        d_state += params["actor_w"] @ d_actor_logits
    if d_q is not None:
        grads["critic_w"] += np.outer(state, d_q)
        grads["critic_b"] += d_q
        d_state += params["critic_w"] @ d_q
    encode_backward(cache, d_state, params)


def update(batch: list[Transition], bundle: AgentBundle, lr: float,
           momentum: float = 0.0, target_bundle: AgentBundle | None = None
           ) -> tuple[float, float]:
    """One combined actor+critic step on a minibatch.

    Averages both losses over the batch, accumulates the analytic gradients,
    applies a single optimizer step, and returns (mean actor loss, mean
    critic loss) for logging.  ``target_bundle`` optionally supplies the
    frozen bootstrap critic.
    """
    if not batch:
        raise ValueError("update requires a nonempty batch")
    inv_b = 1.0 / len(batch)
    actor_total = 0.0
    critic_total = 0.0
    for t in batch:
        state, cache = encode_with_cache(t.state_items, bundle.params, bundle.encoder_config)
        dist = action_distribution(state, bundle)
        q = q_values(state, bundle)
        target = td_target(t, bundle, target_bundle)
        delta = target - float(q[t.action])

        actor_total += -log_prob(dist, t.action) * delta
        critic_total += delta * delta

        one_hot = np.zeros(bundle.num_items)
        one_hot[t.action] = 1.0
        d_logits = delta * (dist - one_hot) * inv_b
        d_q = np.zeros(bundle.num_items)
        d_q[t.action] = -2.0 * delta * inv_b
        backprop_heads(bundle, state, cache, d_logits, d_q)

    actor_mean = actor_total * inv_b
    critic_mean = critic_total * inv_b
    if not (np.isfinite(actor_mean) and np.isfinite(critic_mean)):
        raise ValueError("non-finite loss in update")
    optimizer_step(bundle.params, lr, momentum)
    return actor_mean, critic_mean
