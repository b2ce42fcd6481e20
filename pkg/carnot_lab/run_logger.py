#!/usr/bin/env python3
"""
Run Logger - Carnot Lab
Structured JSON event logging for check runs.
"""

import sys
import uuid
import logging
from typing import Dict, List, Optional, Any, TextIO
from dataclasses import dataclass, asdict, field
from datetime import datetime, timezone
from enum import Enum

import structlog
from pythonjsonlogger import jsonlogger


class LogLevel(Enum):
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARN = "WARN"
    ERROR = "ERROR"


class EventType(Enum):
    RUN_START = "run_start"
    RUN_END = "run_end"
    CHECK_START = "check_start"
    CHECK_END = "check_end"
    CONVERGENCE_WARNING = "convergence_warning"
    CONFIG_ERROR = "config_error"
    CAPABILITY_ERROR = "capability_error"
    REPORT_WRITTEN = "report_written"


_LEVELS = {
    LogLevel.DEBUG: logging.DEBUG,
    LogLevel.INFO: logging.INFO,
    LogLevel.WARN: logging.WARNING,
    LogLevel.ERROR: logging.ERROR,
}


def configure_logging(verbose: bool = False, stream: Optional[TextIO] = None) -> None:
    """Route structlog through the stdlib root logger with a JSON handler"""
    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(jsonlogger.JsonFormatter("%(asctime)s %(name)s %(levelname)s %(message)s"))

    root = logging.getLogger()
    root.handlers = [handler]
    root.setLevel(logging.DEBUG if verbose else logging.INFO)

    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.format_exc_info,
            structlog.stdlib.render_to_log_kwargs,
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=False,
    )


@dataclass
class LogEntry:
    """Structured log entry for one run event"""
    timestamp: str
    run_id: str
    event_type: str
    level: str
    message: str
    metadata: Dict[str, Any] = field(default_factory=dict)
    check: Optional[str] = None


class RunLogger:
    """Structured logger for a single CLI run"""

    def __init__(self, service_name: str = "carnot_lab.run", run_id: Optional[str] = None):
        self.service_name = service_name
        self.run_id = run_id or str(uuid.uuid4())
        self.logger = structlog.get_logger(service_name)
        self.entries: List[LogEntry] = []

    def _create_log_entry(self, event_type: EventType, level: LogLevel, message: str,
                          metadata: Optional[Dict[str, Any]] = None,
                          check: Optional[str] = None) -> LogEntry:
        return LogEntry(
            timestamp=datetime.now(timezone.utc).isoformat(),
            run_id=self.run_id,
            event_type=event_type.value,
            level=level.value,
            message=message,
            metadata=metadata or {},
            check=check,
        )

    def _log_entry(self, entry: LogEntry) -> None:
        self.entries.append(entry)
        data = asdict(entry)
        message = data.pop("message")
        self.logger.log(_LEVELS[LogLevel(entry.level)], message, **data)

    def log_run_start(self, config_path: str, workers: int) -> None:
        self._log_entry(self._create_log_entry(
            EventType.RUN_START, LogLevel.INFO, "Run started",
            {"config": config_path, "workers": workers}))

    def log_run_end(self, exit_code: int, duration_seconds: float) -> None:
        self._log_entry(self._create_log_entry(
            EventType.RUN_END, LogLevel.INFO, "Run finished",
            {"exit_code": exit_code, "duration_seconds": round(duration_seconds, 3)}))

    def log_check_start(self, check: str, params: Dict[str, Any]) -> None:
        self._log_entry(self._create_log_entry(
            EventType.CHECK_START, LogLevel.INFO, "Check started", {"params": params}, check))

    def log_check_end(self, check: str, verdict: str, duration_seconds: float) -> None:
        self._log_entry(self._create_log_entry(
            EventType.CHECK_END, LogLevel.INFO, "Check finished",
            {"verdict": verdict, "duration_seconds": round(duration_seconds, 3)}, check))

    def log_convergence_warning(self, check: str, detail: str) -> None:
        self._log_entry(self._create_log_entry(
            EventType.CONVERGENCE_WARNING, LogLevel.WARN, "Quadrature did not converge",
            {"detail": detail}, check))

    def log_config_error(self, key: Optional[str], message: str) -> None:
        self._log_entry(self._create_log_entry(
            EventType.CONFIG_ERROR, LogLevel.ERROR, message, {"key": key}))

    def log_capability_error(self, check: Optional[str], message: str) -> None:
        self._log_entry(self._create_log_entry(
            EventType.CAPABILITY_ERROR, LogLevel.ERROR, message, {}, check))

    def log_report_written(self, path: str) -> None:
        self._log_entry(self._create_log_entry(
            EventType.REPORT_WRITTEN, LogLevel.DEBUG, "Artifact written", {"path": path}))

    def get_run_statistics(self) -> Dict[str, Any]:
        """Summarize the events recorded so far"""
        ends = [e for e in self.entries if e.event_type == EventType.CHECK_END.value]
        verdicts: Dict[str, int] = {}
        for entry in ends:
            verdict = entry.metadata.get("verdict", "unknown")
            verdicts[verdict] = verdicts.get(verdict, 0) + 1
        return {
            "checks": len(ends),
            "verdicts": verdicts,
            "warnings": sum(1 for e in self.entries if e.level == LogLevel.WARN.value),
            "errors": sum(1 for e in self.entries if e.level == LogLevel.ERROR.value),
            "total_seconds": sum(e.metadata.get("duration_seconds", 0.0) for e in ends),
        }
