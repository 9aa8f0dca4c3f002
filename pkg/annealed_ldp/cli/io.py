"""
Table output for the command line tools.

CSV files start with ``# key=value`` metadata lines followed by a header
row; floats are written with 17 significant digits. JSON files hold a
single object::

    {"metadata": {...}, "columns": [...], "rows": [[...], ...]}

Both are written to a temporary file in the target directory and renamed
into place.
"""

import io
import json
import logging
import os
import tempfile
from datetime import UTC
from datetime import datetime
from pathlib import Path
from typing import Any
from typing import TextIO

import pandas as pd
from django.db import models

import annealed_ldp

logger = logging.getLogger(__name__)

TOOL_NAME = "annealed-ldp"
FLOAT_FORMAT = "%.17g"


class OutputFormat(models.TextChoices):
    CSV = "csv", "CSV"
    JSON = "json", "JSON"


def build_metadata(command: str, parameters: dict[str, Any], *, deterministic: bool = False) -> dict[str, Any]:
    """Header common to every output file; the timestamp is left out under ``deterministic``."""
    metadata = {
        "tool": TOOL_NAME,
        "version": annealed_ldp.__version__,
        "command": command,
        **parameters,
    }
    if not deterministic:
        metadata["generated_at"] = datetime.now(UTC).isoformat(timespec="seconds")
    return metadata


def _metadata_value(value: Any) -> str:
    if isinstance(value, list | tuple):
        return ",".join(str(v) for v in value)
    return str(value)


def render_csv(frame: pd.DataFrame, metadata: dict[str, Any]) -> str:
    buffer = io.StringIO()
    for key, value in metadata.items():
        buffer.write(f"# {key}={_metadata_value(value)}\n")
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return buffer.getvalue()


def render_json(frame: pd.DataFrame, metadata: dict[str, Any]) -> str:
    payload = {
        "metadata": metadata,
        "columns": list(frame.columns),
        "rows": frame.astype(object).where(frame.notna(), None).to_numpy().tolist(),
    }
    return json.dumps(payload, indent=2, default=_json_default) + "\n"


def _json_default(value: Any) -> Any:
    if hasattr(value, "item"):
        return value.item()
    msg = f"Object of type {type(value).__name__} is not JSON serializable"
    raise TypeError(msg)


def render_table(frame: pd.DataFrame, metadata: dict[str, Any], fmt: str = OutputFormat.CSV) -> str:
    if fmt == OutputFormat.JSON:
        return render_json(frame, metadata)
    if fmt == OutputFormat.CSV:
        return render_csv(frame, metadata)
    msg = f"Unknown output format {fmt!r}"
    raise ValueError(msg)


def atomic_write(path: str | Path, text: str) -> Path:
    """Write ``text`` to a temporary sibling of ``path`` and rename it over ``path``."""
    path = Path(path)
    handle, temp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="") as temp:
            temp.write(text)
        Path(temp_name).replace(path)
    except BaseException:
        Path(temp_name).unlink(missing_ok=True)
        raise
    logger.debug(f"Wrote {len(text)} characters to {path}")
    return path


def write_table(
    frame: pd.DataFrame,
    metadata: dict[str, Any],
    *,
    output: str | Path | None = None,
    fmt: str = OutputFormat.CSV,
    stream: TextIO | None = None,
) -> str:
    """Render the table and write it to ``output``, or to ``stream`` when no path is given."""
    text = render_table(frame, metadata, fmt)
    if output is not None:
        atomic_write(output, text)
    elif stream is not None:
        stream.write(text)
    return text


def _parse_metadata_value(value: str) -> Any:
    try:
        return json.loads(value)
    except json.JSONDecodeError:
        return value


def read_table(path: str | Path) -> tuple[dict[str, Any], pd.DataFrame]:
    """
    Read a table written by ``write_table``.

    Returns:
        (metadata, frame); CSV metadata values are decoded as JSON scalars
        where possible and kept as strings otherwise
    """
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        payload = json.loads(text)
        frame = pd.DataFrame(payload["rows"], columns=payload["columns"])
        return payload["metadata"], frame

    metadata: dict[str, Any] = {}
    lines = text.splitlines(keepends=True)
    body_start = 0
    for body_start, line in enumerate(lines):  # noqa: B007
        if not line.startswith("#"):
            break
        key, _, value = line[1:].strip().partition("=")
        metadata[key] = _parse_metadata_value(value)
    else:
        body_start = len(lines)
    frame = pd.read_csv(io.StringIO("".join(lines[body_start:])), float_precision="round_trip")
    return metadata, frame
