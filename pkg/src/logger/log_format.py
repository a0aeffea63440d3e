"""
Responsible for defining the models used to record analysis runs.
"""

import datetime as dt
from typing import Optional, Any

from pydantic import BaseModel, Field

from src.logger.logging_utils import LogLevel


class LogFormat(BaseModel):
    """The base format for all structured logs."""

    timestamp: dt.datetime = Field(
        default_factory=lambda: dt.datetime.now().astimezone(),
        description="Local timestamp when the log was recorded.",
    )

    level: LogLevel = Field(description="The severity level of the log message.")

    message: str = Field(description="The descriptive message for the log event.")

    source_file: Optional[str] = Field(
        default=None, description="The file where the log originated."
    )


class RunLogFormat(LogFormat):
    """Base pydantic model for all records describing a CLI run"""

    mode: Optional[str] = Field(
        default=None,
        description="The run mode (bound, keyrate, sweep, simulate, appendix-demo).",
    )

    config_path: Optional[str] = Field(
        default=None, description="The config file the run was started with."
    )

    additional: Optional[dict[str, Any]] = Field(
        default=None, description="Result summary or inputs associated with the run."
    )


class RunRecordLog(RunLogFormat):
    """Pydantic model for completed runs"""

    exit_code: int = Field(default=0, description="Exit status returned to the shell.")


class RunErrorLog(RunLogFormat):
    """Pydantic model for failed runs"""

    exit_code: int = Field(description="Exit status returned to the shell.")

    error_code: Optional[str] = Field(
        default=None, description="Error code of the raised exception."
    )

    traceback: Optional[str] = Field(
        default=None, description="Full traceback string for unexpected errors."
    )
