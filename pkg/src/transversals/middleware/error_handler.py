"""Error handling around command execution."""

import time
import traceback
import uuid
from collections.abc import Iterator
from contextlib import contextmanager
from typing import Any

import structlog

from transversals.errors import EXIT_INPUT_ERROR, InvariantError, TransversalsError
from transversals.utils.metrics import COMMAND_DURATION

logger = structlog.get_logger()


class CommandFailed(Exception):
    """Raised by command_context with the exit code and the payload to print."""

    def __init__(self, exit_code: int, payload: dict[str, Any]):
        super().__init__(payload.get("error", ""))
        self.exit_code = exit_code
        self.payload = payload


@contextmanager
def command_context(command: str, instance: str | None = None) -> Iterator[str]:
    """Bind run context for logging, time the command and map errors to exit codes."""
    start_time = time.perf_counter()
    run_id = str(uuid.uuid4())[:8]

    structlog.contextvars.bind_contextvars(run_id=run_id, command=command, instance=instance)

    try:
        yield run_id

        duration_ms = (time.perf_counter() - start_time) * 1000
        logger.info("Command completed", duration_ms=round(duration_ms, 2))

    except TransversalsError as exc:
        duration_ms = (time.perf_counter() - start_time) * 1000
        log = logger.error if isinstance(exc, InvariantError) else logger.warning
        log(
            "Command rejected",
            error=str(exc),
            error_type=type(exc).__name__,
            duration_ms=round(duration_ms, 2),
        )
        raise CommandFailed(
            exc.exit_code,
            {"error": str(exc), "error_type": type(exc).__name__, "run_id": run_id},
        )

    except Exception as exc:
        # Log the full exception
        duration_ms = (time.perf_counter() - start_time) * 1000
        logger.error(
            "Unhandled exception",
            error=str(exc),
            error_type=type(exc).__name__,
            traceback=traceback.format_exc(),
            duration_ms=round(duration_ms, 2),
        )
        raise CommandFailed(
            EXIT_INPUT_ERROR, {"error": "Internal error", "run_id": run_id}
        )

    finally:
        COMMAND_DURATION.labels(command=command).observe(time.perf_counter() - start_time)
        structlog.contextvars.unbind_contextvars("run_id", "command", "instance")
