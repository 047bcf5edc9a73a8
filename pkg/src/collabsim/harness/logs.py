"""Line-delimited JSON episode logs.

One record per line, keys sorted, compact separators, so two identical episodes
produce byte-identical files.  The first record is always the header, which
carries the scenario content hash used by replay.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable

LOG_VERSION = 1

# Record kinds compared during replay; prompt and transcript records are diagnostic only.
REPLAYED_KINDS = ("decision", "message", "feedback", "state", "graph", "result")


class LogCorrupt(ValueError):
    pass


class DriftDetected(RuntimeError):
    def __init__(self, step: int, expected: Any = None, got: Any = None) -> None:
        super().__init__(f"replay diverged at step {step}")
        self.step = step
        self.expected = expected
        self.got = got


def dump_record(record: dict[str, Any]) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"), allow_nan=False)


def dumps_log(records: Iterable[dict[str, Any]]) -> str:
    return "".join(dump_record(r) + "\n" for r in records)


def write_log(path: str | Path, records: Iterable[dict[str, Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_log(records), encoding="utf-8")
    return path


def read_log(path: str | Path) -> list[dict[str, Any]]:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise LogCorrupt(f"cannot read {path}: {exc}") from exc
    records = []
    for n, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise LogCorrupt(f"{path}:{n}: {exc}") from exc
        if not isinstance(rec, dict) or "kind" not in rec:
            raise LogCorrupt(f"{path}:{n}: record without a kind")
        records.append(rec)
    if not records or records[0]["kind"] != "header":
        raise LogCorrupt(f"{path}: missing header record")
    if records[0].get("version") != LOG_VERSION:
        raise LogCorrupt(f"{path}: unsupported log version {records[0].get('version')!r}")
    return records


def result_record(records: list[dict[str, Any]]) -> dict[str, Any]:
    for rec in reversed(records):
        if rec["kind"] == "result":
            return rec
    raise LogCorrupt("log has no result record")
