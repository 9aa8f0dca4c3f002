"""
Parsing of parameter grids given as ``start:stop:step`` or comma lists.
"""

import math

import numpy as np

GRID_TOLERANCE = 0.5


def parse_grid(text: str) -> list[float]:
    """
    Expand ``start:stop:step``, inclusive of ``stop`` within half a step.

    Values are computed as start + k * step and rounded to 12 decimals so
    that 0:1:0.1 yields 0.3 rather than 0.30000000000000004.
    """
    parts = text.split(":")
    if len(parts) != 3:
        msg = f"Grid must look like start:stop:step, got {text!r}"
        raise ValueError(msg)
    start, stop, step = (float(p) for p in parts)
    if not all(math.isfinite(v) for v in (start, stop, step)) or step == 0:
        msg = f"Grid needs finite endpoints and a nonzero step, got {text!r}"
        raise ValueError(msg)
    if (stop - start) * step < 0:
        msg = f"Step {step!r} does not lead from {start!r} to {stop!r}"
        raise ValueError(msg)
    count = math.floor((stop - start) / step + GRID_TOLERANCE) + 1
    return [round(v, 12) for v in (start + step * np.arange(count)).tolist()]


def parse_list(text: str) -> list[float]:
    """Comma-separated numbers; empty entries are an error."""
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError as exc:
        msg = f"Expected comma-separated numbers, got {text!r}"
        raise ValueError(msg) from exc
    if not all(math.isfinite(v) for v in values):
        msg = f"Values must be finite, got {text!r}"
        raise ValueError(msg)
    return values


def parse_values(text: str) -> list[float]:
    """A grid when the text contains a colon, otherwise a comma list."""
    text = str(text).strip()
    if not text:
        msg = "Empty parameter list"
        raise ValueError(msg)
    return parse_grid(text) if ":" in text else parse_list(text)


def parse_integers(text: str) -> list[int]:
    values = parse_values(text)
    if any(int(v) != v for v in values):
        msg = f"Expected integers, got {text!r}"
        raise ValueError(msg)
    return [int(v) for v in values]
