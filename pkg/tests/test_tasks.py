"""Tests for sharded tasks, settings and command error handling."""

import pytest

from transversals.config import get_settings
from transversals.errors import EXIT_INPUT_ERROR, CapExceededError, InvalidInstanceError, InvariantError
from transversals.middleware import CommandFailed, command_context
from transversals.services.hypothesis import check_star
from transversals.tasks import ShardedTask


def square(x):
    return x * x


def first_even_square(x):
    return x * x if x % 2 == 0 else None


def explode(x):
    raise RuntimeError(f"bad item {x}")


def test_map_inline():
    """Test map preserves input order inline."""
    assert ShardedTask("square", jobs=1).map(square, [3, 1, 2]) == [9, 1, 4]


def test_map_process_pool():
    """Test map on a process pool matches the inline result."""
    items = list(range(20))
    assert ShardedTask("square", jobs=2).map(square, items) == [x * x for x in items]


def test_first_returns_earliest_hit():
    """Test first returns the first non-None result in input order."""
    assert ShardedTask("first", jobs=1).first(first_even_square, [1, 3, 4, 6]) == 16
    assert ShardedTask("first", jobs=2).first(first_even_square, [1, 3, 4, 6, 7, 8]) == 16
    assert ShardedTask("first", jobs=1).first(first_even_square, [1, 3]) is None


def test_failure_is_reraised():
    """Test exceptions propagate after being logged."""
    with pytest.raises(RuntimeError, match="bad item"):
        ShardedTask("explode", jobs=1).map(explode, [1])


def test_jobs_default_from_settings(monkeypatch):
    """Test the worker count comes from the environment."""
    monkeypatch.setenv("TRANSVERSALS_JOBS", "3")
    assert ShardedTask("default").jobs == 3


def test_settings_override_caps(monkeypatch, collinear_instance):
    """Test enumeration caps are read from the environment."""
    monkeypatch.setenv("TRANSVERSALS_MAX_FAMILY", "2")
    assert get_settings().max_family == 2
    with pytest.raises(CapExceededError):
        check_star(collinear_instance)


def test_settings_defaults():
    """Test default settings."""
    settings = get_settings()
    assert settings.max_family == 10
    assert settings.max_vertices == 20
    assert settings.jobs == 1
    assert settings.log_level == "WARNING"


def test_command_context_success():
    """Test a clean command yields an eight-character run id."""
    with command_context("check", "instance.json") as run_id:
        assert len(run_id) == 8


def test_command_context_maps_domain_errors():
    """Test domain errors become their exit code and payload."""
    with pytest.raises(CommandFailed) as excinfo:
        with command_context("check"):
            raise InvalidInstanceError("bad vertex", "sets[0]")
    assert excinfo.value.exit_code == EXIT_INPUT_ERROR
    assert excinfo.value.payload["error"] == "bad vertex at sets[0]"
    assert excinfo.value.payload["error_type"] == "InvalidInstanceError"


def test_command_context_invariant_error():
    """Test invariant failures keep their error type."""
    with pytest.raises(CommandFailed) as excinfo:
        with command_context("solve"):
            raise InvariantError("witness mismatch")
    assert excinfo.value.payload["error_type"] == "InvariantError"


def test_command_context_hides_internal_errors():
    """Test unexpected exceptions surface as a generic internal error."""
    with pytest.raises(CommandFailed) as excinfo:
        with command_context("audit"):
            raise KeyError("boom")
    assert excinfo.value.exit_code == EXIT_INPUT_ERROR
    assert excinfo.value.payload["error"] == "Internal error"
