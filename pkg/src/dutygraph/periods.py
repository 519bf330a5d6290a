"""Reporting-period identifiers and their time windows.

Weekly periods use ISO week ids (``2026-W10``), monthly ones ``2026-03``.
Windows are computed in the enterprise time zone and returned in UTC,
half-open ``[start, end)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone
from zoneinfo import ZoneInfo

from .model import ReportingPeriod

_WEEK_RE = re.compile(r"^(\d{4})-W(\d{2})$")
_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")


@dataclass(frozen=True)
class Period:
    period_id: str
    kind: ReportingPeriod
    start: datetime  # UTC
    end: datetime  # UTC

    def contains(self, ts: datetime) -> bool:
        return self.start <= ts < self.end

    def covers_deadline(self, deadline: datetime) -> bool:
        """Work due at ``deadline`` belongs here; window ends count inward."""
        return self.start < deadline <= self.end


def parse_period(period_id: str, tz: str = "UTC") -> Period:
    zone = ZoneInfo(tz)
    m = _WEEK_RE.match(period_id)
    if m:
        year, week = int(m.group(1)), int(m.group(2))
        start_d = date.fromisocalendar(year, week, 1)
        start = datetime(start_d.year, start_d.month, start_d.day, tzinfo=zone)
        end = start + timedelta(days=7)
        return Period(period_id, ReportingPeriod.WEEKLY, _utc(start), _utc(end))
    m = _MONTH_RE.match(period_id)
    if m:
        year, month = int(m.group(1)), int(m.group(2))
        if not 1 <= month <= 12:
            raise ValueError(f"bad month in period id: {period_id!r}")
        start = datetime(year, month, 1, tzinfo=zone)
        nxt = datetime(year + 1, 1, 1, tzinfo=zone) if month == 12 else datetime(year, month + 1, 1, tzinfo=zone)
        return Period(period_id, ReportingPeriod.MONTHLY, _utc(start), _utc(nxt))
    raise ValueError(f"unparseable period id: {period_id!r} (want YYYY-Www or YYYY-MM)")


def period_of(ts: datetime, kind: ReportingPeriod, tz: str = "UTC") -> Period:
    local = ts.astimezone(ZoneInfo(tz))
    if kind is ReportingPeriod.WEEKLY:
        year, week, _ = local.date().isocalendar()
        return parse_period(f"{year:04d}-W{week:02d}", tz)
    return parse_period(f"{local.year:04d}-{local.month:02d}", tz)


def _utc(ts: datetime) -> datetime:
    return ts.astimezone(timezone.utc)
