"""This module defines the error detail model and the machine-readable writers used by the CLI."""

import csv
import io
import json
import math
from enum import Enum
from typing import Any, Iterable, Optional, TextIO

from typing_extensions import override

from pydantic import BaseModel, Field


class ErrorDetail(BaseModel):
    """Pydantic model for detailed error information."""

    code: str = Field(description="Error code representing the type of error.")

    details: Optional[str] = Field(default=None, description="Detailed error message.")

    stack_trace: Optional[str] = Field(
        default=None, description="Optional stack trace for debugging purposes."
    )


# ---------------- Serialization helpers ----------------


class CustomJSONEncoder(json.JSONEncoder):
    """
    Responsible for converting models, enums and numpy scalars into a
    suitable format.
    """

    @override
    def default(self, obj):
        """
        Convert custom objects to a serializable format.
        """

        if isinstance(obj, BaseModel):
            return obj.model_dump(mode="json")
        if isinstance(obj, Enum):
            return obj.value
        if hasattr(obj, "item"):
            return obj.item()
        if hasattr(obj, "to_dict"):
            return obj.to_dict()
        return str(obj)  # Fallback to string representation


def round_significant(value: Any, precision: int) -> Any:
    """
    Rounds floats to a fixed number of significant digits so machine output is
    stable across platforms. Non-floats are returned unchanged.
    """

    if isinstance(value, float) and math.isfinite(value):
        return float(f"{value:.{precision}g}")
    if isinstance(value, dict):
        return {key: round_significant(item, precision) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_significant(item, precision) for item in value]
    return value


def flatten_record(record: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    """Flattens nested dictionaries into dotted column names for CSV output."""

    flat: dict[str, Any] = {}
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten_record(value, prefix=f"{name}."))
        elif isinstance(value, (list, tuple)):
            flat[name] = ";".join(str(item) for item in value)
        else:
            flat[name] = value
    return flat


class ResultWriter:
    """
    Writes lists of result records as comma-separated values or as
    line-delimited JSON. Output contains no timestamps, so identical inputs
    produce byte-identical output.
    """

    def __init__(self, precision: int):
        self.precision = precision

    def _prepare(self, records: Iterable[BaseModel | dict[str, Any]]) -> list[dict]:
        prepared = []
        for record in records:
            if isinstance(record, BaseModel):
                record = record.model_dump(mode="json")
            prepared.append(round_significant(record, self.precision))
        return prepared

    def write_jsonl(self, records: Iterable[BaseModel | dict[str, Any]], stream: TextIO) -> None:
        """One JSON object per line."""

        for record in self._prepare(records):
            stream.write(json.dumps(record, cls=CustomJSONEncoder))
            stream.write("\n")

    def write_csv(self, records: Iterable[BaseModel | dict[str, Any]], stream: TextIO) -> None:
        """Header row from the union of all flattened keys, in first-seen order."""

        rows = [flatten_record(record) for record in self._prepare(records)]
        columns: list[str] = []
        for row in rows:
            for column in row:
                if column not in columns:
                    columns.append(column)

        writer = csv.DictWriter(stream, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)

    def render(self, records: Iterable[BaseModel | dict[str, Any]], fmt: str) -> str:
        """Renders the records to a string in the given machine format."""

        buffer = io.StringIO()
        if fmt == "csv":
            self.write_csv(records, buffer)
        else:
            self.write_jsonl(records, buffer)
        return buffer.getvalue()
