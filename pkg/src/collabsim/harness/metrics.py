"""Aggregate the four episode metrics over a trial set."""

from __future__ import annotations

from dataclasses import dataclass
from statistics import fmean
from typing import Iterable, Optional

from collabsim.harness.runner import EpisodeResult


@dataclass(frozen=True)
class AggregateMetrics:
    episodes: int
    completed: int
    succ_rate: float
    mean_ps: float
    mean_ts: float
    mean_as: float

    def row(self) -> dict[str, float | int]:
        return {
            "episodes": self.episodes,
            "completed": self.completed,
            "succ": self.succ_rate,
            "ps": self.mean_ps,
            "ts": self.mean_ts,
            "as": self.mean_as,
        }


def aggregate(results: Iterable[Optional[EpisodeResult]]) -> AggregateMetrics:
    """Means over completed episodes; ``None`` marks an episode that errored out."""
    results = list(results)
    done = [r for r in results if r is not None]
    if not done:
        nan = float("nan")
        return AggregateMetrics(len(results), 0, nan, nan, nan, nan)
    return AggregateMetrics(
        episodes=len(results),
        completed=len(done),
        succ_rate=fmean(1.0 if r.success else 0.0 for r in done),
        mean_ps=fmean(r.partial_success for r in done),
        mean_ts=fmean(r.temporal_steps for r in done),
        mean_as=fmean(r.action_steps for r in done),
    )
