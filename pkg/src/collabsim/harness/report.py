"""Aggregate tables and figures from a directory of episode logs."""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path
from typing import Iterable

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from collabsim.harness.logs import read_log, result_record  # noqa: E402
from collabsim.harness.metrics import AggregateMetrics, aggregate  # noqa: E402
from collabsim.harness.replay import result_from_record  # noqa: E402
from collabsim.harness.runner import EpisodeResult  # noqa: E402

METRICS = (("succ", "Succ"), ("ps", "PS"), ("ts", "TS"), ("as", "AS"))


def variant_label(config: dict) -> str:
    pol = config.get("policy", {})
    parts = [pol.get("backend", "oracle")]
    if pol.get("no_feedback"):
        parts.append("no_feedback")
    if pol.get("no_history"):
        parts.append("no_history")
    if config.get("ablation_no_mobile_robot"):
        parts.append("no_mobile")
    return "+".join(parts)


def collect(paths: Iterable[str | Path]) -> list[tuple[str, EpisodeResult]]:
    """(variant label, result) for every ``*.jsonl`` under the given files or directories."""
    files: list[Path] = []
    for p in map(Path, paths):
        files.extend(sorted(p.rglob("*.jsonl")) if p.is_dir() else [p])
    out = []
    for f in files:
        records = read_log(f)
        header = records[0]
        out.append((variant_label(header["config"]), result_from_record(result_record(records), header, str(f))))
    return out


def summarize(rows: list[tuple[str, EpisodeResult]]) -> dict[tuple[str, str], AggregateMetrics]:
    groups: dict[tuple[str, str], list[EpisodeResult]] = defaultdict(list)
    for label, res in rows:
        groups[(label, res.task_kind)].append(res)
    return {key: aggregate(v) for key, v in sorted(groups.items())}


def write_report(paths: Iterable[str | Path], out_dir: str | Path) -> dict[str, Path]:
    rows = collect(paths)
    if not rows:
        raise FileNotFoundError("no episode logs found")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    episodes_csv = out / "episodes.csv"
    with episodes_csv.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["variant", "task", "scenario", "success", "ps", "ts", "as", "parse_failures", "log"])
        for label, r in rows:
            w.writerow([label, r.task_kind, r.scenario_name, int(r.success), f"{r.partial_success:.4f}",
                        r.temporal_steps, r.action_steps, r.parse_failures, r.log_path])

    summary = summarize(rows)
    summary_csv = out / "summary.csv"
    with summary_csv.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["variant", "task", "episodes", "completed", "succ", "ps", "ts", "as"])
        for (label, task), m in summary.items():
            w.writerow([label, task, m.episodes, m.completed,
                        f"{m.succ_rate:.4f}", f"{m.mean_ps:.4f}", f"{m.mean_ts:.2f}", f"{m.mean_as:.2f}"])

    figure = out / "metrics.png"
    _plot(summary, figure)
    return {"episodes": episodes_csv, "summary": summary_csv, "figure": figure}


def _plot(summary: dict[tuple[str, str], AggregateMetrics], path: Path) -> None:
    labels = sorted({label for label, _ in summary})
    tasks = sorted({task for _, task in summary})
    fig, axes = plt.subplots(1, len(METRICS), figsize=(4 * len(METRICS), 3.6))
    width = 0.8 / max(1, len(labels))
    for ax, (key, title) in zip(axes, METRICS):
        for i, label in enumerate(labels):
            vals = [summary[(label, t)].row()[key] if (label, t) in summary else 0.0 for t in tasks]
            xs = [j + (i - (len(labels) - 1) / 2) * width for j in range(len(tasks))]
            ax.bar(xs, vals, width=width, label=label)
        ax.set_title(title)
        ax.set_xticks(range(len(tasks)))
        ax.set_xticklabels([t.replace("_", "\n") for t in tasks], fontsize=8)
    handles, names = axes[0].get_legend_handles_labels()
    fig.legend(handles, names, loc="upper center", ncol=len(labels), fontsize=8, frameon=False)
    fig.tight_layout(rect=(0, 0, 1, 0.9))
    fig.savefig(path, dpi=120)
    plt.close(fig)
