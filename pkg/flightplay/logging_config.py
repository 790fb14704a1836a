"""
Structured logging configuration for flightplay.

This module provides JSON-structured logging with run ID tracking so the
diagnostics of one CLI invocation can be grouped, plus a plain text mode
for interactive use. Logs always go to stderr; stdout is reserved for
command output.
"""

import contextvars
import json
import logging
import sys
import uuid
from datetime import datetime, timezone
from typing import Any, Dict, Optional, Union

_run_id: contextvars.ContextVar[Optional[str]] = contextvars.ContextVar(
    'flightplay_run_id', default=None
)

TEXT_FORMAT = "[%(asctime)s] %(levelname)s %(name)s: %(message)s"


class StructuredFormatter(logging.Formatter):
    """
    Formatter rendering each record as a single JSON object.

    Context passed through ``extra={'extra': {...}}`` is merged into the
    top level of the object.
    """

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as JSON"""
        log_entry: Dict[str, Any] = {
            'timestamp': datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
            'module': record.module,
            'function': record.funcName,
            'line': record.lineno,
        }

        run_id = getattr(record, 'run_id', None)
        if run_id:
            log_entry['run_id'] = run_id

        extra = getattr(record, 'extra', None)
        if isinstance(extra, dict):
            log_entry.update(extra)

        if record.exc_info:
            log_entry['exception'] = self.formatException(record.exc_info)

        if record.stack_info:
            log_entry['stack_info'] = self.formatStack(record.stack_info)

        return json.dumps(log_entry, default=str, ensure_ascii=False)


class RunContextFilter(logging.Filter):
    """Filter that stamps the current run ID onto log records"""

    def filter(self, record: logging.LogRecord) -> bool:
        if not getattr(record, 'run_id', None):
            run_id = _run_id.get()
            if run_id:
                record.run_id = run_id
        return True


def new_run_id() -> str:
    """Start a new run context and return its ID"""
    run_id = uuid.uuid4().hex[:12]
    _run_id.set(run_id)
    return run_id


def current_run_id() -> Optional[str]:
    return _run_id.get()


def setup_logging(level: Union[str, int] = logging.INFO, fmt: str = "json") -> None:
    """
    Configure logging for the application.

    Args:
        level: Logging level name or number
        fmt: "json" for structured records, "text" for human readable lines
    """
    handler = logging.StreamHandler(sys.stderr)
    if fmt == "json":
        handler.setFormatter(StructuredFormatter())
    else:
        handler.setFormatter(logging.Formatter(TEXT_FORMAT))
    handler.addFilter(RunContextFilter())

    if isinstance(level, str):
        level = level.upper()

    logging.basicConfig(level=level, handlers=[handler], force=True)

    # trio is chatty at DEBUG
    logging.getLogger('trio').setLevel(logging.WARNING)


def log_with_context(
    logger: logging.Logger,
    level: int,
    message: str,
    **context: Any,
) -> None:
    """
    Log a message with additional structured context.

    Args:
        logger: Logger instance
        level: Log level (logging.DEBUG, INFO, etc.)
        message: Log message
        **context: Additional fields to include in the record
    """
    logger.log(level, message, extra={'extra': context})


def log_flight_event(
    logger: logging.Logger,
    flight: str,
    event: str,
    message: str,
    **context: Any,
) -> None:
    """Log a flight processing event with standard fields"""
    log_with_context(
        logger, logging.INFO,
        message,
        event="flight_event",
        flight=flight,
        flight_event=event,
        **context,
    )
