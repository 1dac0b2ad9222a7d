"""Event-sourced classification sessions.

A session is a fold over an append-only event stream: every mutation appends
one event and applies it to the aggregate, so replaying the stream through
the same apply function reconstructs the identical state. Finalization
freezes the session and renders a report.
"""

from __future__ import annotations

import enum
import uuid
from collections.abc import Callable
from dataclasses import dataclass, field
from datetime import datetime

from .errors import (
    IncompletePath,
    InvalidMetadata,
    OutOfOrder,
    ParseError,
    SessionFinalized,
    TutorialNotConfirmed,
    UnknownNode,
)
from .graph import (
    TERMINAL,
    AnswerValue,
    DecisionGraph,
    RiskOutcomeSet,
    classify,
    coerce_answer,
    next_question,
)
from .timeutil import format_ts, parse_ts, utc_now

Clock = Callable[[], datetime]
IdFactory = Callable[[], str]


def _default_id() -> str:
    return uuid.uuid4().hex


class EventKind(str, enum.Enum):
    SESSION_CREATED = "session_created"
    ANSWER_SUBMITTED = "answer_submitted"
    ANSWER_REVISED = "answer_revised"
    SESSION_FINALIZED = "session_finalized"


@dataclass(frozen=True)
class SessionEvent:
    session_id: str
    seq: int
    ts: datetime
    kind: EventKind
    payload: dict

    def to_record(self) -> dict:
        return {
            "session_id": self.session_id,
            "seq": self.seq,
            "ts": format_ts(self.ts),
            "kind": self.kind.value,
            "payload": self.payload,
        }

    @classmethod
    def from_record(cls, record: dict) -> "SessionEvent":
        try:
            kind = EventKind(record["kind"])
        except (KeyError, ValueError) as exc:
            raise ParseError(f"bad event kind in record: {record!r}", field="kind") from exc
        for key in ("session_id", "seq", "ts"):
            if key not in record:
                raise ParseError(f"event record missing {key!r}", field=key)
        return cls(
            session_id=record["session_id"],
            seq=int(record["seq"]),
            ts=parse_ts(record["ts"]),
            kind=kind,
            payload=dict(record.get("payload", {})),
        )


class Deployment(str, enum.Enum):
    STANDALONE = "standalone"
    EMBEDDED = "embedded"


@dataclass(frozen=True)
class SystemMetadata:
    """Descriptive facts about the system under classification.

    Captured for the report and audit trail only; never routes the graph.
    """

    system_name: str
    description: str
    input_modalities: tuple[str, ...] = ()
    output_modalities: tuple[str, ...] = ()
    intended_users: str = ""
    deployment: Deployment = Deployment.STANDALONE

    def validate(self) -> None:
        if not self.system_name.strip():
            raise InvalidMetadata("system_name must be non-empty", field="system_name")
        if not self.description.strip():
            raise InvalidMetadata("description must be non-empty", field="description")

    def to_dict(self) -> dict:
        return {
            "system_name": self.system_name,
            "description": self.description,
            "input_modalities": list(self.input_modalities),
            "output_modalities": list(self.output_modalities),
            "intended_users": self.intended_users,
            "deployment": self.deployment.value,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "SystemMetadata":
        if not isinstance(raw, dict):
            raise InvalidMetadata("metadata must be an object", field="metadata")
        try:
            deployment = Deployment(raw.get("deployment", "standalone"))
        except ValueError as exc:
            raise InvalidMetadata(
                f"deployment must be one of {[d.value for d in Deployment]}",
                field="deployment",
            ) from exc
        meta = cls(
            system_name=str(raw.get("system_name", "")),
            description=str(raw.get("description", "")),
            input_modalities=tuple(raw.get("input_modalities", ())),
            output_modalities=tuple(raw.get("output_modalities", ())),
            intended_users=str(raw.get("intended_users", "")),
            deployment=deployment,
        )
        meta.validate()
        return meta


class SessionStatus(str, enum.Enum):
    DRAFT = "DRAFT"
    FINALIZED = "FINALIZED"


@dataclass(frozen=True)
class AnsweredQuestion:
    node_id: str
    answer: AnswerValue
    justification: str | None
    answered_at: datetime

    def to_dict(self) -> dict:
        return {
            "node_id": self.node_id,
            "answer": self.answer.to_json(),
            "justification": self.justification,
            "answered_at": format_ts(self.answered_at),
        }


@dataclass
class ClassificationSession:
    """Aggregate state of one classification journey.

    Mutated only through apply(); the events list is the source of truth.
    """

    graph: DecisionGraph
    session_id: str = ""
    created_at: datetime | None = None
    tutorial_confirmed: bool = False
    metadata: SystemMetadata | None = None
    content_version: str = ""
    answers: list[AnsweredQuestion] = field(default_factory=list)
    status: SessionStatus = SessionStatus.DRAFT
    result: RiskOutcomeSet | None = None
    events: list[SessionEvent] = field(default_factory=list)

    @property
    def current_node(self) -> str:
        """Node id due next, or TERMINAL once the path is complete."""
        return next_question(self.graph, self.path)

    @property
    def path(self) -> list[tuple[str, AnswerValue]]:
        return [(a.node_id, a.answer) for a in self.answers]

    @property
    def seq(self) -> int:
        return self.events[-1].seq if self.events else 0

    def apply(self, event: SessionEvent) -> None:
        if event.seq != self.seq + 1:
            raise ParseError(
                f"event seq {event.seq} does not follow {self.seq}", field="seq"
            )
        if self.events and event.session_id != self.session_id:
            raise ParseError(
                f"event for {event.session_id!r} applied to {self.session_id!r}",
                field="session_id",
            )
        handler = _APPLY[event.kind]
        handler(self, event)
        self.events.append(event)

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "created_at": format_ts(self.created_at) if self.created_at else None,
            "tutorial_confirmed": self.tutorial_confirmed,
            "metadata": self.metadata.to_dict() if self.metadata else None,
            "content_version": self.content_version,
            "status": self.status.value,
            "current_node": self.current_node,
            "answers": [a.to_dict() for a in self.answers],
            "result": self.result.to_dict() if self.result else None,
        }


def _apply_created(session: ClassificationSession, event: SessionEvent) -> None:
    payload = event.payload
    session.session_id = event.session_id
    session.created_at = event.ts
    session.tutorial_confirmed = bool(payload["tutorial_confirmed"])
    session.metadata = SystemMetadata.from_dict(payload["metadata"])
    session.content_version = payload.get("content_version", session.graph.version)


def _apply_answer(session: ClassificationSession, event: SessionEvent) -> None:
    node_id = event.payload["node"]
    answer = coerce_answer(
        session.graph.node(node_id), AnswerValue.from_json(event.payload["answer"])
    )
    session.answers.append(
        AnsweredQuestion(
            node_id=node_id,
            answer=answer,
            justification=event.payload.get("justification"),
            answered_at=event.ts,
        )
    )


def _apply_revision(session: ClassificationSession, event: SessionEvent) -> None:
    node_id = event.payload["node"]
    index = next(
        (i for i, a in enumerate(session.answers) if a.node_id == node_id), None
    )
    if index is None:
        raise UnknownNode(f"{node_id!r} has no answer to revise", field="node")
    del session.answers[index:]
    _apply_answer(session, event)


def _apply_finalized(session: ClassificationSession, event: SessionEvent) -> None:
    session.result = classify(session.graph, session.path)
    session.status = SessionStatus.FINALIZED


_APPLY = {
    EventKind.SESSION_CREATED: _apply_created,
    EventKind.ANSWER_SUBMITTED: _apply_answer,
    EventKind.ANSWER_REVISED: _apply_revision,
    EventKind.SESSION_FINALIZED: _apply_finalized,
}


def start_session(
    graph: DecisionGraph,
    metadata: SystemMetadata,
    tutorial_confirmed: bool,
    *,
    session_id: str | None = None,
    clock: Clock = utc_now,
    id_factory: IdFactory = _default_id,
) -> ClassificationSession:
    """Open a DRAFT session positioned at the graph's start node.

    Raises:
        TutorialNotConfirmed: the tutorial checkbox gate was not passed.
        InvalidMetadata: required metadata fields empty or malformed.
    """
    if not tutorial_confirmed:
        raise TutorialNotConfirmed(
            "confirm the tutorial before starting a classification",
            field="tutorial_confirmed",
        )
    metadata.validate()
    session = ClassificationSession(graph=graph)
    session.apply(
        SessionEvent(
            session_id=session_id or id_factory(),
            seq=1,
            ts=clock(),
            kind=EventKind.SESSION_CREATED,
            payload={
                "tutorial_confirmed": True,
                "metadata": metadata.to_dict(),
                "content_version": graph.version,
            },
        )
    )
    return session


def _require_draft(session: ClassificationSession) -> None:
    if session.status is not SessionStatus.DRAFT:
        raise SessionFinalized(f"session {session.session_id} is finalized")


def submit_answer(
    session: ClassificationSession,
    node_id: str,
    answer: AnswerValue,
    justification: str | None = None,
    *,
    clock: Clock = utc_now,
) -> ClassificationSession:
    """Answer the current question and advance.

    Raises:
        SessionFinalized: session already finalized.
        OutOfOrder: node_id is not the question currently due.
        IllegalAnswer: answer does not fit the node.
    """
    _require_draft(session)
    current = session.current_node
    if node_id != current:
        raise OutOfOrder(
            f"expected an answer for {current!r}, got {node_id!r}", current=current
        )
    if current == TERMINAL:
        raise OutOfOrder("path is complete", current=TERMINAL)
    coerced = coerce_answer(session.graph.node(node_id), answer)
    session.apply(
        SessionEvent(
            session_id=session.session_id,
            seq=session.seq + 1,
            ts=clock(),
            kind=EventKind.ANSWER_SUBMITTED,
            payload={
                "node": node_id,
                "answer": coerced.to_json(),
                "justification": justification,
            },
        )
    )
    return session


def revise_answer(
    session: ClassificationSession,
    node_id: str,
    answer: AnswerValue,
    justification: str | None = None,
    *,
    clock: Clock = utc_now,
) -> ClassificationSession:
    """Replace an earlier answer, discarding everything downstream of it.

    The graph may route differently after the change, so stale downstream
    answers cannot be kept without breaking prefix validity.

    Raises:
        SessionFinalized: session already finalized.
        UnknownNode: node_id was never answered.
        IllegalAnswer: replacement answer does not fit the node.
    """
    _require_draft(session)
    if not any(a.node_id == node_id for a in session.answers):
        raise UnknownNode(f"{node_id!r} has no answer to revise", field="node")
    coerced = coerce_answer(session.graph.node(node_id), answer)
    session.apply(
        SessionEvent(
            session_id=session.session_id,
            seq=session.seq + 1,
            ts=clock(),
            kind=EventKind.ANSWER_REVISED,
            payload={
                "node": node_id,
                "answer": coerced.to_json(),
                "justification": justification,
            },
        )
    )
    return session


def finalize(
    session: ClassificationSession,
    *,
    clock: Clock = utc_now,
) -> "ClassificationReport":
    """Classify the completed path, freeze the session, render the report.

    Raises:
        SessionFinalized: already finalized.
        IncompletePath: questions remain unanswered.
    """
    _require_draft(session)
    if session.current_node != TERMINAL:
        raise IncompletePath(
            f"cannot finalize: {session.current_node!r} still unanswered"
        )
    result = classify(session.graph, session.path)
    session.apply(
        SessionEvent(
            session_id=session.session_id,
            seq=session.seq + 1,
            ts=clock(),
            kind=EventKind.SESSION_FINALIZED,
            payload={"labels": [str(l.label) for l in result.labels]},
        )
    )
    return build_report(session, generated_at=clock())


def replay_session(graph: DecisionGraph, events: list[SessionEvent]) -> ClassificationSession:
    """Reconstruct a session by folding its event stream.

    Raises:
        ParseError: empty stream, wrong first event, or broken seq chain.
    """
    if not events:
        raise ParseError("cannot replay an empty event stream")
    if events[0].kind is not EventKind.SESSION_CREATED:
        raise ParseError(
            f"stream must open with session_created, got {events[0].kind.value}",
            field="kind",
        )
    session = ClassificationSession(graph=graph)
    for event in events:
        session.apply(event)
    return session


@dataclass(frozen=True)
class ClassificationReport:
    """Finalized session snapshot with outcome, rationale and justifications.

    Regenerating from the same session differs only in generated_at.
    """

    session_id: str
    content_version: str
    metadata: SystemMetadata
    answers: tuple[AnsweredQuestion, ...]
    result: RiskOutcomeSet
    generated_at: datetime

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "content_version": self.content_version,
            "metadata": self.metadata.to_dict(),
            "answers": [a.to_dict() for a in self.answers],
            "result": self.result.to_dict(),
            "generated_at": format_ts(self.generated_at),
        }


def build_report(
    session: ClassificationSession,
    *,
    generated_at: datetime | None = None,
) -> ClassificationReport:
    """Render the report for a finalized session.

    Raises:
        IncompletePath: session is not finalized.
    """
    if session.status is not SessionStatus.FINALIZED or session.result is None:
        raise IncompletePath("report requires a finalized session")
    return ClassificationReport(
        session_id=session.session_id,
        content_version=session.content_version,
        metadata=session.metadata,
        answers=tuple(session.answers),
        result=session.result,
        generated_at=generated_at or utc_now(),
    )
