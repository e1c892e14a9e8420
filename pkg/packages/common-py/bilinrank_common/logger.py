"""
bilinrank Application Logger

Structured logging for solvers and experiment runs with support for run IDs,
context propagation, and JSON output for easy post-processing.

Records are written to stderr so that CSV and JSON written to stdout stay clean.

Usage:
    from bilinrank_common.logger import get_logger

    logger = get_logger("core.varpro")
    logger.info("Solve finished", iterations=42, reason="converged_obj")

    # With run context
    logger = logger.with_context(seed=1234)
    logger.debug("Step rejected", damping=1e-2)
"""

import json
import logging
import sys
from contextvars import ContextVar
from datetime import datetime, timezone
from typing import Any, Dict, Optional

# Context variable for the current experiment run
_run_id_var: ContextVar[Optional[str]] = ContextVar("run_id", default=None)


def set_run_id(run_id: str) -> None:
    """
    Set the run ID for the current context.

    This ID is included in every log record emitted within the same context
    (e.g., one solver run inside an experiment).

    Args:
        run_id: Identifier of the run, typically "<experiment>-<index>"
    """
    _run_id_var.set(run_id)


def get_run_id() -> Optional[str]:
    """
    Get the current run ID from context.

    Returns:
        Run ID if set, None otherwise
    """
    return _run_id_var.get()


def clear_run_id() -> None:
    """Clear the run ID from current context"""
    _run_id_var.set(None)


_LEVELS = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warn": logging.WARNING,
    "warning": logging.WARNING,
    "error": logging.ERROR,
    "critical": logging.CRITICAL,
}


def _level_from_name(level: str) -> int:
    """Convert log level string to logging constant"""
    return _LEVELS.get(level.lower(), logging.INFO)


class _StderrHandler(logging.StreamHandler):
    """Stream handler that looks up sys.stderr at emit time (it may be swapped after import)."""

    @property
    def stream(self):  # type: ignore[override]
        return sys.stderr

    @stream.setter
    def stream(self, value) -> None:
        pass


class JSONFormatter(logging.Formatter):
    """JSON formatter emitting one object per line."""

    def format(self, record: logging.LogRecord) -> str:
        log_data = {
            "timestamp": datetime.fromtimestamp(record.created, tz=timezone.utc)
            .isoformat()
            .replace("+00:00", "Z"),
            "level": record.levelname,
            "component": getattr(record, "component", "unknown"),
            "message": record.getMessage(),
        }

        run_id = get_run_id()
        if run_id:
            log_data["run_id"] = run_id

        if hasattr(record, "context"):
            log_data.update(record.context)

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        return json.dumps(log_data, default=str)


class BilinrankLogger:
    """
    Structured logger for bilinrank components.

    Attributes:
        component: Name of the component using this logger
        logger: Underlying Python logger instance
        context: Persistent context included in all log messages
    """

    def __init__(self, component: str, log_level: str = "INFO"):
        """
        Initialize logger for a component.

        Args:
            component: Name of the component (e.g., "core.varpro", "harness")
            log_level: Log level (DEBUG, INFO, WARN, ERROR)
        """
        self.component = component
        self.context: Dict[str, Any] = {}

        self.logger = logging.getLogger(f"bilinrank.{component}")
        self.logger.setLevel(_level_from_name(log_level))

        # Remove existing handlers to avoid duplicates
        self.logger.handlers.clear()

        handler = _StderrHandler()
        handler.setFormatter(JSONFormatter())
        self.logger.addHandler(handler)

        self.logger.propagate = False

    def set_level(self, level: str) -> None:
        """Change the level of the underlying logger (shared by context copies)."""
        self.logger.setLevel(_level_from_name(level))

    def is_debug(self) -> bool:
        """True when DEBUG records would be emitted."""
        return self.logger.isEnabledFor(logging.DEBUG)

    def _log(self, level: str, msg: str, **extra: Any) -> None:
        context = {**self.context, **extra}
        log_method = getattr(self.logger, level.lower())
        log_method(msg, extra={"component": self.component, "context": context})

    def debug(self, msg: str, **context: Any) -> None:
        """
        Log debug message.

        Example:
            >>> logger.debug("Step accepted", iteration=3, damping=1e-3)
        """
        self._log("debug", msg, **context)

    def info(self, msg: str, **context: Any) -> None:
        """
        Log info message.

        Example:
            >>> logger.info("Solve finished", iterations=57)
        """
        self._log("info", msg, **context)

    def warning(self, msg: str, **context: Any) -> None:
        """Log warning message."""
        self._log("warning", msg, **context)

    def warn(self, msg: str, **context: Any) -> None:
        """Alias for warning()"""
        self.warning(msg, **context)

    def error(self, msg: str, **context: Any) -> None:
        """Log error message."""
        self._log("error", msg, **context)

    def critical(self, msg: str, **context: Any) -> None:
        """Log critical message."""
        self._log("critical", msg, **context)

    def exception(self, msg: str, **context: Any) -> None:
        """
        Log exception with stack trace.

        Should be called from an exception handler to include stack trace.
        """
        full_context = {**self.context, **context}
        self.logger.exception(msg, extra={"component": self.component, "context": full_context})

    def with_context(self, **ctx: Any) -> "BilinrankLogger":
        """
        Create a new logger with additional persistent context.

        Does not modify the original logger.

        Example:
            >>> run_logger = logger.with_context(seed=7, solver="varpro")
            >>> run_logger.info("Run started")
        """
        new_logger = object.__new__(BilinrankLogger)
        new_logger.component = self.component
        new_logger.context = {**self.context, **ctx}
        new_logger.logger = self.logger
        return new_logger


def get_logger(component: str, log_level: str = "INFO") -> BilinrankLogger:
    """
    Create a logger for a component.

    Args:
        component: Name of the component (e.g., "core.admm")
        log_level: Log level (DEBUG, INFO, WARN, ERROR)

    Returns:
        BilinrankLogger instance
    """
    return BilinrankLogger(component, log_level)


def configure_logging(log_level: str = "INFO") -> None:
    """
    Set the level of every bilinrank logger created so far.

    The CLI calls this once from its --log-level option.
    """
    for name, existing in logging.root.manager.loggerDict.items():
        if name.startswith("bilinrank.") and isinstance(existing, logging.Logger):
            existing.setLevel(_level_from_name(log_level))
