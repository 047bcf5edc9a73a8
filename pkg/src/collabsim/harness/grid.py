"""Layout x object-count experiment grid, aggregated per task."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from collabsim.harness.metrics import AggregateMetrics, aggregate
from collabsim.harness.runner import EpisodeConfig, EpisodeResult, run_episode
from collabsim.policy.base import PolicyConfig
from collabsim.world.generate import LAYOUT_NAMES, OBJECT_COUNTS, TASK_NAMES, instance_path

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridConfig:
    tasks: tuple[str, ...] = TASK_NAMES
    layouts: tuple[str, ...] = LAYOUT_NAMES
    object_counts: tuple[int, ...] = OBJECT_COUNTS
    horizon: int = 50
    seed: int = 0
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    ablation_no_mobile_robot: bool = False
    out_dir: Optional[str] = None
    workers: int = 1
    instance_root: Optional[str] = None

    def scenario_path(self, layout: str, task: str, n: int) -> Path:
        if self.instance_root is not None:
            return Path(self.instance_root) / f"{layout}__{task}__{n}.json"
        return instance_path(layout, task, n)


@dataclass
class GridEpisode:
    task: str
    scenario_path: str
    result: Optional[EpisodeResult]
    error: Optional[str] = None


@dataclass
class GridResult:
    per_task: dict[str, AggregateMetrics]
    episodes: list[GridEpisode]

    @property
    def overall(self) -> AggregateMetrics:
        return aggregate(e.result for e in self.episodes)


def _run_one(cfg: GridConfig, task: str, path: Path) -> GridEpisode:
    log_path = None
    if cfg.out_dir is not None:
        log_path = Path(cfg.out_dir) / f"{path.stem}.jsonl"
    ec = EpisodeConfig(
        scenario_path=str(path),
        horizon=cfg.horizon,
        seed=cfg.seed,
        policy=cfg.policy,
        ablation_no_mobile_robot=cfg.ablation_no_mobile_robot,
    )
    try:
        return GridEpisode(task, str(path), run_episode(ec, log_path=log_path).result)
    except (OSError, ValueError) as exc:
        log.error("%s: %s", path, exc)
        return GridEpisode(task, str(path), None, f"{type(exc).__name__}: {exc}")


def run_grid(cfg: GridConfig) -> GridResult:
    jobs = [
        (task, cfg.scenario_path(layout, task, n))
        for task in cfg.tasks
        for layout in cfg.layouts
        for n in cfg.object_counts
    ]
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            episodes = list(pool.map(lambda job: _run_one(cfg, *job), jobs))
    else:
        episodes = [_run_one(cfg, *job) for job in jobs]
    per_task = {task: aggregate(e.result for e in episodes if e.task == task) for task in cfg.tasks}
    return GridResult(per_task, episodes)


def format_table(per_task: dict[str, AggregateMetrics], label: str = "oracle") -> str:
    """One row per method, four metric columns per task."""
    tasks = list(per_task)
    head1 = f"{'':<14}" + "".join(f"| {t:^31} " for t in tasks)
    head2 = f"{'method':<14}" + "".join(f"| {'Succ':>6} {'PS':>6} {'TS':>7} {'AS':>7} " for _ in tasks)
    row = f"{label:<14}" + "".join(
        f"| {m.succ_rate:6.2f} {m.mean_ps:6.2f} {m.mean_ts:7.2f} {m.mean_as:7.2f} " for m in per_task.values()
    )
    return "\n".join([head1, head2, "-" * len(head2), row])
