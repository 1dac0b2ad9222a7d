"""RFC 3339 timestamp helpers.

datetime.fromisoformat on Python 3.10 rejects a trailing 'Z'; these helpers
paper over that and keep every stored timestamp timezone-aware UTC.
"""

from __future__ import annotations

from datetime import datetime, timezone

from .errors import ParseError


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


def format_ts(ts: datetime) -> str:
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def parse_ts(raw: str) -> datetime:
    if not isinstance(raw, str):
        raise ParseError(f"timestamp must be a string, got {type(raw).__name__}", field="ts")
    text = raw[:-1] + "+00:00" if raw.endswith("Z") else raw
    try:
        ts = datetime.fromisoformat(text)
    except ValueError as exc:
        raise ParseError(f"malformed timestamp {raw!r}", field="ts") from exc
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts
