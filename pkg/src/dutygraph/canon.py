"""Canonical serialization helpers: stable JSON, UTC timestamps, durations."""

from __future__ import annotations

import json
import re
from datetime import datetime, timedelta, timezone
from typing import Any

_DURATION_RE = re.compile(r"^(\d+(?:\.\d+)?)\s*(d|h|m|s)$")
_UNIT_SECONDS = {"d": 86400.0, "h": 3600.0, "m": 60.0, "s": 1.0}


def canonical_json(doc: Any) -> str:
    """Stable field order, no NaN, compact separators."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def fmt_ts(ts: datetime) -> str:
    """RFC 3339 in UTC with a Z suffix; naive input is treated as UTC."""
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def parse_ts(raw: str) -> datetime:
    ts = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def fmt_duration(d: timedelta) -> str:
    seconds = d.total_seconds()
    for unit in ("d", "h", "m"):
        span = _UNIT_SECONDS[unit]
        if seconds % span == 0 and seconds >= span:
            value = seconds / span
            return f"{int(value)}{unit}"
    return f"{seconds:g}s"


def parse_duration(raw: str | int | float) -> timedelta:
    """Accepts plain seconds or short forms like ``7d``, ``12h``, ``30m``, ``45s``."""
    if isinstance(raw, (int, float)):
        return timedelta(seconds=float(raw))
    m = _DURATION_RE.match(raw.strip())
    if not m:
        raise ValueError(f"unparseable duration: {raw!r}")
    value, unit = m.groups()
    return timedelta(seconds=float(value) * _UNIT_SECONDS[unit])


def score2(x: float) -> float:
    """Scores are reported at fixed 2-decimal precision."""
    return round(x + 0.0, 2)
