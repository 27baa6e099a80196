"""Episode-level metrics: Return, Length, and Average Reward, plus the
recent-window smoothing used for learning curves."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

__all__ = ["EpisodeRecord", "MetricMeans", "compute_metrics", "smooth_curve"]

SMOOTH_WINDOW = 20


@dataclass(frozen=True)
class EpisodeRecord:
    """One finished episode: cumulative return, length, and their ratio."""
    episode_index: int
    global_step: int
    episode_return: float
    length: int
    avg_reward: float

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("episode length must be >= 1")
        if abs(self.avg_reward * self.length - self.episode_return) > 1e-9:
            raise ValueError("avg_reward * length must equal episode_return")

    @classmethod
    def create(cls, episode_index: int, global_step: int,
               episode_return: float, length: int) -> "EpisodeRecord":
        return cls(episode_index, global_step, episode_return, length,
                   episode_return / length)


class MetricMeans(NamedTuple):
    episode_return: float
    length: float
    avg_reward: float


def compute_metrics(episodes: Iterable[EpisodeRecord]) -> MetricMeans:
    """Arithmetic means over episodes; avg_reward is the mean of the
    per-episode ratios R_i / Len_i."""
    eps = list(episodes)
    if not eps:
        raise ValueError("compute_metrics requires at least one episode")
    n = len(eps)
    return MetricMeans(
        sum(e.episode_return for e in eps) / n,
        sum(e.length for e in eps) / n,
        sum(e.avg_reward for e in eps) / n,
    )


def smooth_curve(episodes: list[EpisodeRecord], window: int = SMOOTH_WINDOW) -> list[MetricMeans]:
    """Trailing-window means (most recent ``window`` episodes) at every point
    of the curve."""
    out = []
    for i in range(len(episodes)):
        out.append(compute_metrics(episodes[max(0, i - window + 1):i + 1]))
    return out
