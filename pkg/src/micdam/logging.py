"""Structured JSON-lines audit trail on stderr.

Silent unless :func:`configure` is called with ``verbose=True`` (the CLI's
``--verbose`` flag). Every record is one JSON object with ``event``,
``timestamp``, ``level``, ``logger`` and ``payload``.
"""

from __future__ import annotations

import json
import logging
import sys
from datetime import datetime, timezone
from typing import Any, TextIO

import numpy as np

ROOT_LOGGER = "micdam"

EVENTS = (
    "config_loaded",
    "mesh_ready",
    "step_started",
    "newton_iteration",
    "step_cutback",
    "step_converged",
    "step_failed",
    "fields_written",
    "run_complete",
    "calibration_trial",
    "sweep_run",
    "error",
)


def _plain(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return str(value)


class JsonLinesFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        line = {
            "event": getattr(record, "event", record.getMessage()),
            "timestamp": datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            "level": record.levelname.lower(),
            "logger": record.name,
            "payload": getattr(record, "payload", {}),
        }
        return json.dumps(line, default=_plain)


def configure(verbose: bool, stream: TextIO | None = None) -> logging.Logger:
    """Attach (or remove) the JSON-lines handler on the package logger."""
    logger = logging.getLogger(ROOT_LOGGER)
    for handler in list(logger.handlers):
        if getattr(handler, "_micdam", False):
            logger.removeHandler(handler)
    logger.propagate = False
    if verbose:
        handler = logging.StreamHandler(stream or sys.stderr)
        handler.setFormatter(JsonLinesFormatter())
        handler._micdam = True  # type: ignore[attr-defined]
        logger.addHandler(handler)
        logger.setLevel(logging.DEBUG)
    else:
        logger.addHandler(_silent_handler())
        logger.setLevel(logging.WARNING)
    return logger


def _silent_handler() -> logging.Handler:
    handler = logging.NullHandler()
    handler._micdam = True  # type: ignore[attr-defined]
    return handler


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


def log_event(
    logger: logging.Logger, event: str, *, log_level: int = logging.INFO, **payload: Any
) -> None:
    """Emit one audit event; payload keys keep their call order."""
    if logger.isEnabledFor(log_level):
        logger.log(log_level, event, extra={"event": event, "payload": payload})
