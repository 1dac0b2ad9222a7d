"""Append-only interaction telemetry and its desk-scale analytics.

Events arrive per session in time order (bounded clock skew tolerated) and
are never updated or deleted. Dwell time is measured over visible-focus
intervals: a question_shown opens an interval for its node and the next
question_answered or question_shown in the same session closes it. Support
openings and revisions do not close intervals; intervals still open at the
end of the log are dropped.
"""

from __future__ import annotations

import enum
from collections import Counter, defaultdict
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from datetime import datetime, timedelta

from .errors import OutOfOrderTimestamp, ParseError, UnknownMaterial
from .timeutil import format_ts, parse_ts

DEFAULT_SKEW_TOLERANCE = timedelta(seconds=2)


class InteractionKind(str, enum.Enum):
    QUESTION_SHOWN = "question_shown"
    QUESTION_ANSWERED = "question_answered"
    SUPPORT_OPENED = "support_opened"
    REVISION = "revision"
    TUTORIAL_CONFIRMED = "tutorial_confirmed"


# Kinds that close an open question_shown interval.
_CLOSERS = {InteractionKind.QUESTION_SHOWN, InteractionKind.QUESTION_ANSWERED}


@dataclass(frozen=True)
class InteractionEvent:
    session_id: str
    ts: datetime
    kind: InteractionKind
    node_context: str | None = None
    material_id: str | None = None

    def __post_init__(self):
        if self.kind is InteractionKind.SUPPORT_OPENED and not self.material_id:
            raise ParseError("support_opened requires material_id", field="material_id")
        if self.kind in _CLOSERS and not self.node_context:
            raise ParseError(
                f"{self.kind.value} requires node_context", field="node_context"
            )

    def to_record(self) -> dict:
        record = {
            "session_id": self.session_id,
            "ts": format_ts(self.ts),
            "kind": self.kind.value,
        }
        if self.node_context is not None:
            record["node_context"] = self.node_context
        if self.material_id is not None:
            record["material_id"] = self.material_id
        return record

    @classmethod
    def from_record(cls, record: dict) -> "InteractionEvent":
        try:
            kind = InteractionKind(record["kind"])
        except (KeyError, ValueError) as exc:
            raise ParseError(f"bad telemetry kind in {record!r}", field="kind") from exc
        for key in ("session_id", "ts"):
            if key not in record:
                raise ParseError(f"telemetry record missing {key!r}", field=key)
        return cls(
            session_id=record["session_id"],
            ts=parse_ts(record["ts"]),
            kind=kind,
            node_context=record.get("node_context"),
            material_id=record.get("material_id"),
        )


@dataclass
class EventLog:
    """In-memory append-only event log with per-session ordering checks.

    known_materials, when set, rejects support_opened events referencing
    material ids outside the active catalog.
    """

    skew_tolerance: timedelta = DEFAULT_SKEW_TOLERANCE
    known_materials: frozenset[str] | None = None
    events: list[InteractionEvent] = field(default_factory=list)
    _last_ts: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)


def record_event(log: EventLog, event: InteractionEvent) -> EventLog:
    """Append one event, enforcing per-session time order.

    Raises:
        OutOfOrderTimestamp: earlier than the session's last event beyond
            the skew tolerance.
        UnknownMaterial: support_opened for a material not in the catalog.
    """
    if (
        event.kind is InteractionKind.SUPPORT_OPENED
        and log.known_materials is not None
        and event.material_id not in log.known_materials
    ):
        raise UnknownMaterial(
            f"unknown support material {event.material_id!r}", field="material_id"
        )
    last = log._last_ts.get(event.session_id)
    if last is not None and event.ts < last - log.skew_tolerance:
        raise OutOfOrderTimestamp(
            f"event at {format_ts(event.ts)} precedes session's last event "
            f"at {format_ts(last)} beyond tolerance"
        )
    log.events.append(event)
    if last is None or event.ts > last:
        log._last_ts[event.session_id] = event.ts
    return log


def dwell_times(
    events: Iterable[InteractionEvent], session_id: str
) -> dict[str, float]:
    """Per-node summed focus duration in seconds for one session.

    Revisits after revision add further intervals. Negative intervals from
    tolerated clock skew clamp to zero. Nodes never shown are absent.
    """
    totals: dict[str, float] = {}
    open_node: str | None = None
    open_ts: datetime | None = None
    for event in events:
        if event.session_id != session_id:
            continue
        if event.kind in _CLOSERS and open_node is not None:
            seconds = max(0.0, (event.ts - open_ts).total_seconds())
            totals[open_node] = totals.get(open_node, 0.0) + seconds
            open_node = None
        if event.kind is InteractionKind.QUESTION_SHOWN:
            open_node = event.node_context
            open_ts = event.ts
    return totals


@dataclass(frozen=True)
class KindUsage:
    """Access distribution of one support-material kind across users."""

    kind: str
    histogram: dict[int, int]  # accesses per user -> number of users
    share: float  # users with at least one access / total users

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "share": self.share,
        }


@dataclass(frozen=True)
class SupportUsageReport:
    total_users: int
    kinds: tuple[KindUsage, ...]

    def to_dict(self) -> dict:
        return {
            "total_users": self.total_users,
            "kinds": [k.to_dict() for k in self.kinds],
        }


UNKNOWN_KIND = "unknown"


def support_usage(
    events: Iterable[InteractionEvent],
    material_kinds: Mapping[str, str],
) -> SupportUsageReport:
    """Per-kind access histograms and reach across all users in the log.

    A user is any session id appearing in the log, whether or not it opened
    support material, so each kind's histogram (zero bucket included) sums
    to the user count. material_kinds maps material id to its kind; events
    for unmapped materials are tallied under "unknown".
    """
    users: set[str] = set()
    per_kind_counts: dict[str, Counter] = defaultdict(Counter)
    kind_names = sorted(set(material_kinds.values()))
    for event in events:
        users.add(event.session_id)
        if event.kind is InteractionKind.SUPPORT_OPENED:
            kind = material_kinds.get(event.material_id, UNKNOWN_KIND)
            per_kind_counts[kind][event.session_id] += 1
    for kind in per_kind_counts:
        if kind not in kind_names:
            kind_names.append(kind)
    total = len(users)
    kinds = []
    for kind in kind_names:
        counts = per_kind_counts.get(kind, Counter())
        histogram = Counter(counts.values())
        histogram[0] = total - len(counts)
        if histogram[0] == 0 and total > 0:
            del histogram[0]
        active = sum(1 for c in counts.values() if c >= 1)
        kinds.append(
            KindUsage(
                kind=kind,
                histogram=dict(histogram) if total else {},
                share=active / total if total else 0.0,
            )
        )
    return SupportUsageReport(total_users=total, kinds=tuple(kinds))
