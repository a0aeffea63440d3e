"""
Run logger: keeps a JSON record of every CLI run.
"""

import json
import logging
from pathlib import Path
from typing import Any, Optional

from src.config.settings import settings
from src.logger.log_format import RunRecordLog, RunErrorLog
from src.logger.logging_utils import LogLevel


def sanitize_path(path: str, project_root: str = "DecoyBound") -> str:
    """
    Shorten file paths so they start from the project root (e.g., 'DecoyBound/...').
    """
    if not path:
        return path
    path = Path(path).as_posix()
    if project_root in path:
        return path[path.index(project_root) :]
    return path


def sanitize_traceback(tb: Optional[str], project_root: str = "DecoyBound") -> Optional[str]:
    """
    Shorten all file paths inside a traceback string.
    """
    if not tb:
        return tb
    return "\n".join(sanitize_path(line, project_root) for line in tb.splitlines())


class JsonFileHandler(logging.Handler):
    """
    Logging handler that writes logs as a JSON list in a file.
    Ensures files exist and maintains logs under {"logs": [...]}.
    """

    def __init__(self, filename: Path):
        super().__init__()
        self.filename = filename
        self.filename.parent.mkdir(parents=True, exist_ok=True)
        if not self.filename.exists():
            self._write_logs([])

    def emit(self, record: logging.LogRecord):
        log_entry = record.msg
        if isinstance(log_entry, (RunRecordLog, RunErrorLog)):
            logs = self._read_logs()
            logs.append(log_entry.model_dump(mode="json"))
            self._write_logs(logs)

    def _read_logs(self) -> list:
        try:
            with self.filename.open("r", encoding="utf-8") as f:
                data = json.load(f)
                return data.get("logs", [])
        except (FileNotFoundError, json.JSONDecodeError):
            return []

    def _write_logs(self, logs: list) -> None:
        with self.filename.open("w", encoding="utf-8") as f:
            json.dump({"logs": logs}, f, indent=4, default=str)


class RunLogger:
    """
    Writes completed runs into run-records.json and failed runs into
    run-errors.json under the configured log directory.

    Does nothing unless LOG_RUN_RECORDS is enabled.
    """

    def __init__(
        self,
        source_file: str = __name__,
        log_dir: Optional[Path] = None,
        enabled: Optional[bool] = None,
    ):
        self.enabled = settings.logging.LOG_RUN_RECORDS if enabled is None else enabled
        self.source_file = source_file
        self.logger = logging.getLogger(source_file)

        self.record_handler: Optional[JsonFileHandler] = None
        self.error_handler: Optional[JsonFileHandler] = None

        if self.enabled:
            log_dir = Path(log_dir or settings.logging.LOG_DIRECTORY)
            log_dir.mkdir(parents=True, exist_ok=True)
            self.record_handler = JsonFileHandler(log_dir / "run-records.json")
            self.error_handler = JsonFileHandler(log_dir / "run-errors.json")

    def _log(self, log_entry, is_error: bool = False):
        """Internal helper to send log to the right file handler."""
        handler = self.error_handler if is_error else self.record_handler
        if handler is None:
            return
        record = logging.LogRecord(
            name=self.logger.name,
            level=logging.ERROR if is_error else logging.INFO,
            pathname="",
            lineno=0,
            msg=log_entry,
            args=(),
            exc_info=None,
        )
        handler.emit(record)

    def record(
        self,
        message: str,
        mode: Optional[str] = None,
        config_path: Optional[str] = None,
        additional: Optional[dict[str, Any]] = None,
        exit_code: int = 0,
    ):
        """Record a run that finished (successfully or with a FAIL verdict)."""
        log_entry = RunRecordLog(
            message=message,
            level=LogLevel.INFO,
            mode=mode,
            config_path=config_path,
            additional=additional,
            exit_code=exit_code,
            source_file=sanitize_path(self.source_file) if self.source_file else None,
        )
        self._log(log_entry, is_error=False)

    def error(
        self,
        message: str,
        exit_code: int,
        error_code: Optional[str] = None,
        traceback: Optional[str] = None,
        mode: Optional[str] = None,
        config_path: Optional[str] = None,
        additional: Optional[dict[str, Any]] = None,
    ):
        """Record a run that was aborted by an error."""
        log_entry = RunErrorLog(
            message=message,
            level=LogLevel.ERROR,
            mode=mode,
            config_path=config_path,
            additional=additional,
            exit_code=exit_code,
            error_code=error_code,
            traceback=sanitize_traceback(traceback),
            source_file=sanitize_path(self.source_file) if self.source_file else None,
        )
        self._log(log_entry, is_error=True)
