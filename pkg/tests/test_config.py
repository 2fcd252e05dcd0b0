import pytest

from olab.config import Limits, load_limits
from olab.errors import ConfigError


def test_defaults_when_unset() -> None:
    assert load_limits({}) == Limits()


def test_reads_group_order_cap() -> None:
    limits = load_limits({"OLAB_MAX_GROUP_ORDER": "5000"})
    assert limits.max_group_order == 5000
    assert limits.max_vertices == Limits().max_vertices


def test_empty_value_is_ignored() -> None:
    assert load_limits({"OLAB_MAX_VERTICES": ""}) == Limits()


def test_reads_every_variable() -> None:
    limits = load_limits(
        {
            "OLAB_MAX_GROUP_ORDER": "1",
            "OLAB_MAX_VERTICES": "2",
            "OLAB_MAX_ORBIT": "3",
            "OLAB_MAX_INDEX": "4",
        }
    )
    assert (
        limits.max_group_order,
        limits.max_vertices,
        limits.max_orbit,
        limits.max_index,
    ) == (1, 2, 3, 4)


def test_non_integer_raises() -> None:
    with pytest.raises(ConfigError, match="OLAB_MAX_ORBIT must be an integer"):
        load_limits({"OLAB_MAX_ORBIT": "lots"})


def test_non_positive_raises() -> None:
    with pytest.raises(ConfigError, match="must be positive, got 0"):
        load_limits({"OLAB_MAX_INDEX": "0"})


def test_reads_process_environment(monkeypatch) -> None:
    monkeypatch.setenv("OLAB_MAX_GROUP_ORDER", "77")
    assert load_limits().max_group_order == 77
