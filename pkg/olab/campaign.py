"""
Scheduling of independent verification instances.

Instances run in a process pool when more than one worker is requested. Each
finished instance is appended to a JSONL checkpoint, so an interrupted
campaign resumes where it stopped. Results always come back in submission
order, whatever order the workers finish in.
"""

import json
import logging
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path

logger = logging.getLogger(__name__)


@dataclass
class Checkpoint:
    """Append-only log of finished instances for one campaign."""

    path: Path
    campaign: str
    done: dict[str, dict] = field(default_factory=dict)

    @classmethod
    def open(cls, path: Path, campaign: str, resume: bool = False) -> "Checkpoint":
        """Start a fresh checkpoint, or load the entries of `campaign` to resume.

        Lines from other campaigns and unreadable lines (a write cut short by an
        interruption) are skipped.
        """
        checkpoint = cls(path, campaign)
        if not resume or not path.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text("", encoding="utf-8")
            return checkpoint
        text = path.read_text(encoding="utf-8")
        for number, line in enumerate(text.splitlines(), start=1):
            try:
                entry = json.loads(line)
            except json.JSONDecodeError:
                logger.warning("Skipping unreadable line %d of %s", number, path)
                continue
            if (
                isinstance(entry, dict)
                and entry.get("campaign") == campaign
                and "key" in entry
                and "record" in entry
            ):
                checkpoint.done[entry["key"]] = entry["record"]
        if text and not text.endswith("\n"):
            # close a cut line so new entries start on their own
            with open(path, "a", encoding="utf-8") as f:
                f.write("\n")
        logger.info(
            "Resuming from %s: %d finished instances", path, len(checkpoint.done)
        )
        return checkpoint

    def record(self, key: str, record: dict) -> None:
        self.done[key] = record
        entry = {"campaign": self.campaign, "key": key, "record": record}
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(json.dumps(entry, sort_keys=True) + "\n")


def run_instances(
    task: Callable,
    items: list,
    key: Callable[..., str],
    encode: Callable[..., dict],
    decode: Callable[[dict], object],
    workers: int = 1,
    checkpoint: Checkpoint | None = None,
) -> list:
    """Apply `task` to every item, skipping items already in the checkpoint.

    With workers > 1 the task and items must pickle; `encode` and `decode` run
    in this process only.
    """
    keys = [key(item) for item in items]
    results = {}
    if checkpoint is not None:
        for k in keys:
            if k in checkpoint.done:
                results[k] = decode(checkpoint.done[k])
    pending = [
        (k, item) for k, item in zip(keys, items, strict=True) if k not in results
    ]
    if len(pending) < len(items):
        restored = len(items) - len(pending)
        logger.debug("%d of %d instances restored", restored, len(items))

    def finish(k: str, result) -> None:
        results[k] = result
        if checkpoint is not None:
            checkpoint.record(k, encode(result))

    if workers > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(pending))) as pool:
            futures = {pool.submit(task, item): k for k, item in pending}
            for future in as_completed(futures):
                finish(futures[future], future.result())
    else:
        for k, item in pending:
            finish(k, task(item))
    return [results[k] for k in keys]
