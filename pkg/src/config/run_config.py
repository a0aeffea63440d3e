"""
Reads run configurations (TOML files or tally CSV files) and reads/writes the
tally CSV format shared by the simulator and the analyzer.
"""

import csv
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Optional, TextIO

from pydantic import ValidationError

from src.logger.default_logger import get_logger
from src.schemas.config_schema import RunConfig
from src.schemas.tally_schema import ObservedTallies
from src.utils.exceptions import ConfigException

logger = get_logger(__name__)

TALLY_HEADER = ("source", "count")
SOURCE_ROWS = {"vacuum": "N0", "decoy": "Nd", "signal": "Ns"}
TALLY_META_ROWS = ("M", "p0", "p", "pp", "t0_signal", "t0_decoy")
SOURCE_META_ROWS = ("mu_decoy", "mu_signal", "delta_m", "vacuum_cap")


def _describe_validation_error(error: ValidationError) -> str:
    parts = []
    for err in error.errors():
        location = ".".join(str(part) for part in err["loc"])
        message = err["msg"].removeprefix("Value error, ")
        parts.append(f"{location}: {message}" if location else message)
    return "; ".join(parts)


def _merge(base: dict[str, Any], overrides: dict[str, Any]) -> dict[str, Any]:
    """Recursive dictionary merge; None values in overrides are skipped."""

    merged = dict(base)
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _format_number(value: Any) -> str:
    # repr keeps every digit, so a written file reads back to the same floats
    return repr(value) if isinstance(value, float) else str(value)


def write_tally_csv(
    tallies: ObservedTallies,
    stream: TextIO,
    source_meta: Optional[dict[str, float]] = None,
) -> None:
    """
    Writes tallies as `source,count` rows followed by metadata rows.

    Args:
        tallies (ObservedTallies): The tallies to write.
        stream (TextIO): Destination.
        source_meta (dict): Optional mu_decoy, mu_signal, delta_m and
        vacuum_cap rows, making the file a complete bound/keyrate input.
    """

    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(TALLY_HEADER)
    for row_name, field in SOURCE_ROWS.items():
        writer.writerow((row_name, getattr(tallies, field)))
    for field in TALLY_META_ROWS:
        writer.writerow((field, _format_number(getattr(tallies, field))))
    for field in SOURCE_META_ROWS:
        if source_meta and field in source_meta:
            writer.writerow((field, _format_number(float(source_meta[field]))))


def read_tally_csv(path: Path) -> dict[str, Any]:
    """
    Reads a tally CSV into raw config sections.

    Returns:
        dict: `tallies` section, plus a `source` section when the file
        carries the intensity rows.

    Raises:
        ConfigException: On a wrong header, unknown row or missing row.
    """

    values: dict[str, str] = {}
    with path.open("r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or tuple(cell.strip() for cell in header) != TALLY_HEADER:
            raise ConfigException(
                details=f"cli.parse_config: {path} must start with the header 'source,count'"
            )
        for line_number, row in enumerate(reader, start=2):
            if not row or not any(cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise ConfigException(
                    details=f"cli.parse_config: {path}:{line_number} must have two columns"
                )
            key, value = row[0].strip(), row[1].strip()
            known = set(SOURCE_ROWS) | set(TALLY_META_ROWS) | set(SOURCE_META_ROWS)
            if key not in known:
                raise ConfigException(details=f"cli.parse_config: unknown row '{key}' in {path}")
            if "%" in value:
                raise ConfigException(
                    details=f"cli.parse_config: '{key}' uses a percent sign, write a plain decimal"
                )
            values[key] = value

    missing = [key for key in (*SOURCE_ROWS, "M", "p0", "p", "pp") if key not in values]
    if missing:
        raise ConfigException(
            details=f"cli.parse_config: {path} is missing row(s): {', '.join(missing)}"
        )

    def number(key: str, kind: type) -> Any:
        try:
            return kind(float(values[key])) if kind is int else kind(values[key])
        except ValueError as e:
            raise ConfigException(
                details=f"cli.parse_config: '{key}' is not a number: {values[key]!r}"
            ) from e

    tallies = {
        "M": number("M", int),
        "p0": number("p0", float),
        "p": number("p", float),
        "pp": number("pp", float),
        "counts": {field: number(row, int) for row, field in SOURCE_ROWS.items()},
    }
    for key in ("t0_signal", "t0_decoy"):
        if key in values:
            tallies[key] = number(key, float)

    raw: dict[str, Any] = {"tallies": tallies}
    if "mu_decoy" in values and "mu_signal" in values:
        raw["source"] = {key: number(key, float) for key in SOURCE_META_ROWS if key in values}
    return raw


def parse_config(path: str | Path, overrides: Optional[dict[str, Any]] = None) -> RunConfig:
    """
    Loads and validates a run configuration.

    TOML files are read as-is; CSV files are tally files and default to the
    `bound` mode. Overrides (from command-line flags) win over the file.

    Raises:
        ConfigException: If the file is missing, malformed or inconsistent.
        The details name the offending key.
    """

    path = Path(path)
    if not path.is_file():
        raise ConfigException(details=f"cli.parse_config: config file '{path}' not found")

    if path.suffix.lower() == ".csv":
        raw = read_tally_csv(path)
    else:
        try:
            with path.open("rb") as f:
                raw = tomllib.load(f)
        except tomllib.TOMLDecodeError as e:
            raise ConfigException(details=f"cli.parse_config: {path} is not valid TOML: {e}") from e

    raw = _merge(raw, overrides or {})

    try:
        config = RunConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigException(details=f"cli.parse_config: {_describe_validation_error(e)}") from e

    logger.debug(f"Parsed config {path} in mode '{config.mode.value}'")
    return config
