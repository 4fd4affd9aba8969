"""Length parsing for the CLI boundary.

Everything inside the library is SI; suffixed strings like "2.46A", "25um"
or "1e-4m" are only accepted (and required) at the configuration boundary.
"""

import re

__all__ = ["UnitError", "parse_length", "format_length"]

_SCALE = {
    "A": 1e-10,
    "nm": 1e-9,
    "um": 1e-6,
    "mm": 1e-3,
    "m": 1.0,
}

_PATTERN = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(A|nm|um|mm|m)\s*$")


class UnitError(ValueError):
    """Raised for a length without a recognised unit suffix."""


def parse_length(text):
    """Parse a suffixed length string into meters.

    Bare numbers are rejected on purpose: a missing unit is a config bug,
    never something to default.
    """
    if isinstance(text, (int, float)):
        raise UnitError(
            f"bare number {text!r}: lengths must carry a unit suffix (A, nm, um, mm, m)"
        )
    m = _PATTERN.match(str(text))
    if m is None:
        raise UnitError(
            f"cannot parse length {text!r}: expected e.g. '2.46A', '25um', '1e-4m'"
        )
    return float(m.group(1)) * _SCALE[m.group(2)]


def format_length(meters):
    """Render a length in meters back to a suffixed string (for diagnostics)."""
    for suffix in ("m", "mm", "um", "nm", "A"):
        scale = _SCALE[suffix]
        if abs(meters) >= scale or suffix == "A":
            return f"{meters / scale:g}{suffix}"
    return f"{meters:g}m"
