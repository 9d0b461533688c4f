"""Flat key=value configuration files, overridable by CLI flags.

Format: one `key = value` per line; `#` starts a comment; values may be
quoted strings, integers, floats, or true/false. Unknown keys are kept so
callers can validate against their own schema.
"""

from __future__ import annotations

from pathlib import Path
from typing import Union

from .errors import ParseError

Scalar = Union[str, int, float, bool]


def _coerce(raw: str) -> Scalar:
    if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "'\"":
        return raw[1:-1]
    low = raw.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    return raw


def parse_config(text: str) -> dict[str, Scalar]:
    out: dict[str, Scalar] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ParseError(f"expected key = value, got {stripped!r}", line=lineno)
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ParseError("empty key", line=lineno)
        out[key] = _coerce(value)
    return out


def load_config(path: Union[str, Path]) -> dict[str, Scalar]:
    return parse_config(Path(path).read_text(encoding="utf-8"))
