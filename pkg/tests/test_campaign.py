import json
from functools import partial

from olab.campaign import Checkpoint, run_instances


def _encode(value: int) -> dict:
    return {"value": value}


def _decode(record: dict) -> int:
    return record["value"]


def _run(items, workers: int = 1, checkpoint: Checkpoint | None = None) -> list:
    return run_instances(
        partial(pow, 2),
        items,
        key=str,
        encode=_encode,
        decode=_decode,
        workers=workers,
        checkpoint=checkpoint,
    )


class TestCheckpoint:
    def test_fresh_checkpoint_truncates(self, tmp_path) -> None:
        path = tmp_path / "run" / "checkpoint.jsonl"
        path.parent.mkdir()
        path.write_text('{"stale": true}\n')
        checkpoint = Checkpoint.open(path, "a")
        assert checkpoint.done == {}
        assert path.read_text() == ""

    def test_missing_file_on_resume_starts_fresh(self, tmp_path) -> None:
        checkpoint = Checkpoint.open(tmp_path / "none.jsonl", "a", resume=True)
        assert checkpoint.done == {}

    def test_records_round_trip(self, tmp_path) -> None:
        path = tmp_path / "checkpoint.jsonl"
        checkpoint = Checkpoint.open(path, "a")
        checkpoint.record("3", {"value": 8})
        checkpoint.record("4", {"value": 16})
        resumed = Checkpoint.open(path, "a", resume=True)
        assert resumed.done == {"3": {"value": 8}, "4": {"value": 16}}

    def test_other_campaigns_are_ignored(self, tmp_path) -> None:
        path = tmp_path / "checkpoint.jsonl"
        Checkpoint.open(path, "a").record("3", {"value": 8})
        assert Checkpoint.open(path, "b", resume=True).done == {}

    def test_cut_line_is_skipped(self, tmp_path, caplog) -> None:
        path = tmp_path / "checkpoint.jsonl"
        Checkpoint.open(path, "a").record("3", {"value": 8})
        with open(path, "a") as f:
            f.write('{"campaign": "a", "key": "4", "rec')
        resumed = Checkpoint.open(path, "a", resume=True)
        assert resumed.done == {"3": {"value": 8}}
        assert "Skipping unreadable line 2" in caplog.text
        resumed.record("4", {"value": 16})
        reloaded = Checkpoint.open(path, "a", resume=True)
        assert reloaded.done == {"3": {"value": 8}, "4": {"value": 16}}


class TestRunInstances:
    def test_results_keep_item_order(self) -> None:
        assert _run([5, 1, 3]) == [32, 2, 8]

    def test_pool_matches_sequential(self) -> None:
        items = list(range(12))
        assert _run(items, workers=3) == _run(items)

    def test_every_instance_is_checkpointed(self, tmp_path) -> None:
        path = tmp_path / "checkpoint.jsonl"
        _run([1, 2, 3], workers=2, checkpoint=Checkpoint.open(path, "a"))
        lines = [json.loads(line) for line in path.read_text().splitlines()]
        assert sorted(entry["key"] for entry in lines) == ["1", "2", "3"]
        assert {entry["campaign"] for entry in lines} == {"a"}

    def test_restored_instances_are_not_recomputed(self, tmp_path) -> None:
        path = tmp_path / "checkpoint.jsonl"
        seeded = Checkpoint.open(path, "a")
        # a recorded value the task would never produce
        seeded.record("2", {"value": -1})
        calls = []

        def task(x: int) -> int:
            calls.append(x)
            return 2**x

        resumed = Checkpoint.open(path, "a", resume=True)
        results = run_instances(
            task, [1, 2, 3], str, _encode, _decode, checkpoint=resumed
        )
        assert results == [2, -1, 8]
        assert calls == [1, 3]
        assert len(path.read_text().splitlines()) == 3
