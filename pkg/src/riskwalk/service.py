"""HTTP service: content delivery, sessions, telemetry ingest, analytics.

State is file-backed through FileStore; sessions are replayed from their
event logs on first access after a restart. All mutations are persisted
(fsynced) before the response is sent. Commands for one session are
serialized through a per-session lock; distinct sessions proceed in
parallel.
"""

from __future__ import annotations

import asyncio
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .content import (
    SHIPPED_CATALOG,
    SHIPPED_GRAPH,
    SupportCatalog,
    SupportKind,
    fill_expert_contact,
    load_content_bundle,
    shipped_graph_path,
)
from .errors import (
    ContentVersionMismatch,
    DuplicateSubmission,
    NotFound,
    ParseError,
    RiskwalkError,
)
from .graph import TERMINAL, AnswerValue, DecisionGraph, coerce_answer
from .likert import parse_survey_csv, summarize_statements
from .session import (
    ClassificationSession,
    SessionStatus,
    SystemMetadata,
    build_report,
    finalize,
    replay_session,
    revise_answer,
    start_session,
    submit_answer,
)
from .store import FileStore
from .telemetry import (
    DEFAULT_SKEW_TOLERANCE,
    EventLog,
    InteractionEvent,
    InteractionKind,
    dwell_times,
    record_event,
    support_usage,
)
from .timeutil import utc_now

DEFAULT_LISTEN_ADDR = "127.0.0.1:8000"
DEFAULT_EXPERT_NAME = "the compliance help desk"
DEFAULT_EXPERT_EMAIL = "compliance@example.org"


@dataclass(frozen=True)
class ServiceConfig:
    listen_addr: str = DEFAULT_LISTEN_ADDR
    data_dir: Path = Path("data")
    content_bundle: Path | None = None  # graph file; None selects the shipped bundle
    expert_contact_name: str = DEFAULT_EXPERT_NAME
    expert_contact_email: str = DEFAULT_EXPERT_EMAIL
    enforce_single_submission: bool = False
    skew_tolerance_seconds: float = DEFAULT_SKEW_TOLERANCE.total_seconds()
    static_dir: Path | None = None

    @classmethod
    def from_env(cls, env=None) -> "ServiceConfig":
        env = os.environ if env is None else env
        bundle = env.get("CONTENT_BUNDLE")
        static = env.get("FRONTEND_DIST")
        return cls(
            listen_addr=env.get("LISTEN_ADDR", DEFAULT_LISTEN_ADDR),
            data_dir=Path(env.get("DATA_DIR", "data")),
            content_bundle=Path(bundle) if bundle else None,
            expert_contact_name=env.get("EXPERT_CONTACT_NAME", DEFAULT_EXPERT_NAME),
            expert_contact_email=env.get("EXPERT_CONTACT_EMAIL", DEFAULT_EXPERT_EMAIL),
            enforce_single_submission=env.get("ENFORCE_SINGLE_SUBMISSION", "")
            .lower()
            in ("1", "true", "yes", "on"),
            static_dir=Path(static) if static else None,
        )

    @property
    def host_port(self) -> tuple[str, int]:
        host, _, port = self.listen_addr.rpartition(":")
        return host or "127.0.0.1", int(port)


def _load_documents(config: ServiceConfig) -> tuple[dict, dict]:
    if config.content_bundle is None:
        graph_path = shipped_graph_path()
        catalog_path = graph_path.with_name(SHIPPED_CATALOG)
    else:
        graph_path = config.content_bundle
        catalog_path = graph_path.with_name(
            graph_path.name.replace("rcs-", "support-")
        )
    try:
        graph_doc = json.loads(Path(graph_path).read_text(encoding="utf-8"))
        catalog_doc = json.loads(Path(catalog_path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read content bundle: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"content bundle is not valid JSON: {exc}") from exc
    return graph_doc, catalog_doc


def _fill_catalog_doc(catalog_doc: dict, name: str, email: str) -> dict:
    doc = json.loads(json.dumps(catalog_doc))
    for material in doc.get("materials", ()):
        if material.get("kind") == SupportKind.EXPERT_CONTACT.value:
            body = material.get("body", "")
            material["body"] = body.replace("{name}", name).replace("{email}", email)
    return doc


@dataclass
class AppState:
    config: ServiceConfig
    graph: DecisionGraph
    catalog: SupportCatalog
    graph_body: bytes
    store: FileStore
    telemetry: EventLog
    sessions: dict[str, ClassificationSession] = field(default_factory=dict)
    locks: dict[str, asyncio.Lock] = field(default_factory=dict)
    locks_guard: asyncio.Lock = field(default_factory=asyncio.Lock)

    async def lock_for(self, session_id: str) -> asyncio.Lock:
        async with self.locks_guard:
            return self.locks.setdefault(session_id, asyncio.Lock())


def build_state(config: ServiceConfig) -> AppState:
    """Load and validate content, open the store, warm the telemetry log.

    Raises RiskwalkError subclasses on any content problem so a broken
    bundle refuses to serve.
    """
    graph_doc, catalog_doc = _load_documents(config)
    graph, catalog = load_content_bundle(graph_doc, catalog_doc)
    catalog = fill_expert_contact(
        catalog, config.expert_contact_name, config.expert_contact_email
    )
    filled_doc = _fill_catalog_doc(
        catalog_doc, config.expert_contact_name, config.expert_contact_email
    )
    body = json.dumps(
        {"version": graph.version, "graph": graph_doc, "catalog": filled_doc},
        sort_keys=True,
        separators=(",", ":"),
    ).encode("utf-8")
    store = FileStore(config.data_dir)
    telemetry = EventLog(
        known_materials=frozenset(m.id for m in catalog.materials),
    )
    for event in store.iter_interactions():
        telemetry.events.append(event)
        last = telemetry._last_ts.get(event.session_id)
        if last is None or event.ts > last:
            telemetry._last_ts[event.session_id] = event.ts
    return AppState(
        config=config,
        graph=graph,
        catalog=catalog,
        graph_body=body,
        store=store,
        telemetry=telemetry,
    )


async def _json_body(request: Request):
    try:
        body = await request.json()
    except Exception as exc:
        raise ParseError("request body must be valid JSON") from exc
    return body


def _require_dict(body, what: str = "request body") -> dict:
    if not isinstance(body, dict):
        raise ParseError(f"{what} must be a JSON object")
    return body


_CONFLICT_CODES = {
    "OUT_OF_ORDER",
    "SESSION_FINALIZED",
    "DUPLICATE_SUBMISSION",
    "INCOMPLETE_PATH",
    "CONTENT_VERSION_MISMATCH",
    "OUT_OF_ORDER_TS",
}


def _status_for(error: RiskwalkError) -> int:
    if error.code == "NOT_FOUND":
        return 404
    if error.code in _CONFLICT_CODES:
        return 409
    return 400


def render_question(state: AppState, node_id: str) -> dict | None:
    """Wire render model for one question: prompt, options, materials."""
    if node_id == TERMINAL:
        return None
    node = state.graph.node(node_id)
    materials = state.catalog.materials_for(state.graph, node_id)
    rendered = {
        "id": node.id,
        "prompt": node.prompt,
        "answer_mode": node.answer_mode.value,
        "legal_ref": node.legal_ref,
        "options": [
            {"id": o.id, "label": o.label, "is_none": o.is_none_sentinel}
            for o in node.options
        ],
        "materials": [m.to_dict() for m in materials],
    }
    if node.phrasing_note:
        rendered["phrasing_note"] = node.phrasing_note
    return rendered


def _session_view(state: AppState, session: ClassificationSession) -> dict:
    current = session.current_node
    return {
        "session": session.to_dict(),
        "question": render_question(state, current),
    }


def _get_session(state: AppState, session_id: str) -> ClassificationSession:
    cached = state.sessions.get(session_id)
    if cached is not None:
        return cached
    events = state.store.load_session_events(session_id)
    if not events:
        raise NotFound(f"no session {session_id!r}", field="session_id")
    session = replay_session(state.graph, events)
    state.sessions[session_id] = session
    return session


def _check_version(state: AppState, session: ClassificationSession) -> None:
    if session.content_version != state.graph.version:
        raise ContentVersionMismatch(
            f"session pinned to content {session.content_version!r}, "
            f"server now runs {state.graph.version!r}"
        )


def _bridge_telemetry(
    state: AppState, session_id: str, kind: InteractionKind, node: str | None
) -> None:
    event = InteractionEvent(
        session_id=session_id,
        ts=utc_now(),
        kind=kind,
        node_context=node,
    )
    record_event(state.telemetry, event)
    state.store.append_interaction(event)


def create_app(config: ServiceConfig | None = None, state: AppState | None = None) -> FastAPI:
    """Build the application; a broken content bundle fails fast here."""
    if state is None:
        state = build_state(config or ServiceConfig.from_env())
    app = FastAPI(title="riskwalk", docs_url=None, redoc_url=None)
    app.state.riskwalk = state

    @app.exception_handler(RiskwalkError)
    async def _riskwalk_error(request: Request, exc: RiskwalkError):
        return JSONResponse(status_code=_status_for(exc), content={"error": exc.to_dict()})

    @app.get("/v1/graph")
    async def get_graph(request: Request):
        if request.headers.get("if-none-match") == f'"{state.graph.version}"':
            return Response(status_code=304)
        return Response(
            content=state.graph_body,
            media_type="application/json",
            headers={"ETag": f'"{state.graph.version}"'},
        )

    @app.post("/v1/sessions", status_code=201)
    async def create_session(request: Request):
        body = _require_dict(await _json_body(request))
        pinned = body.get("content_version")
        if pinned is not None and pinned != state.graph.version:
            raise ContentVersionMismatch(
                f"client pinned content {pinned!r}, server runs "
                f"{state.graph.version!r}"
            )
        user_ref = body.get("user_ref")
        if state.config.enforce_single_submission:
            if not user_ref:
                raise ParseError(
                    "user_ref is required while single-submission enforcement is on",
                    field="user_ref",
                )
            finalized = state.store.finalized_session_for(user_ref)
            if finalized is not None:
                raise DuplicateSubmission(
                    f"user {user_ref!r} already finalized session {finalized!r}"
                )
        metadata = SystemMetadata.from_dict(body.get("metadata") or {})
        session = start_session(
            state.graph, metadata, bool(body.get("tutorial_confirmed"))
        )
        lock = await state.lock_for(session.session_id)
        async with lock:
            for event in session.events:
                state.store.append_session_event(event)
            state.sessions[session.session_id] = session
            if user_ref:
                state.store.claim_session(session.session_id, str(user_ref))
            _bridge_telemetry(
                state, session.session_id, InteractionKind.TUTORIAL_CONFIRMED, None
            )
            view = _session_view(state, session)
        view["session_id"] = session.session_id
        return view

    @app.get("/v1/sessions/{session_id}")
    async def get_session(session_id: str):
        lock = await state.lock_for(session_id)
        async with lock:
            session = _get_session(state, session_id)
            return _session_view(state, session)

    @app.post("/v1/sessions/{session_id}/answers")
    async def post_answer(session_id: str, request: Request):
        body = _require_dict(await _json_body(request))
        if "node" not in body or "answer" not in body:
            raise ParseError("answer requires node and answer fields", field="node")
        node_id = body["node"]
        answer = AnswerValue.from_json(body["answer"])
        justification = body.get("justification")
        lock = await state.lock_for(session_id)
        async with lock:
            session = _get_session(state, session_id)
            _check_version(state, session)
            if _is_resend(session, node_id, answer, justification):
                view = _session_view(state, session)
                view["idempotent"] = True
                return view
            submit_answer(session, node_id, answer, justification)
            state.store.append_session_event(session.events[-1])
            _bridge_telemetry(
                state, session_id, InteractionKind.QUESTION_ANSWERED, node_id
            )
            view = _session_view(state, session)
        view["idempotent"] = False
        return view

    @app.post("/v1/sessions/{session_id}/revisions")
    async def post_revision(session_id: str, request: Request):
        body = _require_dict(await _json_body(request))
        if "node" not in body or "answer" not in body:
            raise ParseError("revision requires node and answer fields", field="node")
        node_id = body["node"]
        answer = AnswerValue.from_json(body["answer"])
        lock = await state.lock_for(session_id)
        async with lock:
            session = _get_session(state, session_id)
            _check_version(state, session)
            revise_answer(session, node_id, answer, body.get("justification"))
            state.store.append_session_event(session.events[-1])
            _bridge_telemetry(state, session_id, InteractionKind.REVISION, node_id)
            return _session_view(state, session)

    @app.post("/v1/sessions/{session_id}/finalize")
    async def post_finalize(session_id: str):
        lock = await state.lock_for(session_id)
        async with lock:
            session = _get_session(state, session_id)
            _check_version(state, session)
            if state.config.enforce_single_submission:
                user_ref = state.store.user_for_session(session_id)
                if user_ref:
                    finalized = state.store.finalized_session_for(user_ref)
                    if finalized is not None and finalized != session_id:
                        raise DuplicateSubmission(
                            f"user {user_ref!r} already finalized session "
                            f"{finalized!r}"
                        )
            report = finalize(session)
            state.store.append_session_event(session.events[-1])
            state.store.mark_finalized(session_id)
            return report.to_dict()

    @app.get("/v1/sessions/{session_id}/report")
    async def get_report(session_id: str):
        lock = await state.lock_for(session_id)
        async with lock:
            session = _get_session(state, session_id)
            return build_report(session).to_dict()

    @app.post("/v1/events", status_code=202)
    async def post_events(request: Request):
        body = await _json_body(request)
        if isinstance(body, dict) and "events" in body:
            raw_events = body["events"]
        elif isinstance(body, list):
            raw_events = body
        else:
            raw_events = [_require_dict(body, "event")]
        if not isinstance(raw_events, list):
            raise ParseError("events must be a list", field="events")
        accepted = 0
        for raw in raw_events:
            record = dict(_require_dict(raw, "event"))
            record.setdefault("ts", utc_now().isoformat())
            event = InteractionEvent.from_record(record)
            record_event(state.telemetry, event)
            state.store.append_interaction(event)
            accepted += 1
        return {"accepted": accepted}

    @app.post("/v1/surveys", status_code=201)
    async def post_survey(request: Request):
        body = _require_dict(await _json_body(request))
        if "csv" not in body:
            raise ParseError("survey upload requires a csv field", field="csv")
        responses = parse_survey_csv(body["csv"])
        existing = {
            (r.respondent_id, r.statement_id) for r in state.store.load_survey()
        }
        clashes = [
            (r.respondent_id, r.statement_id)
            for r in responses
            if (r.respondent_id, r.statement_id) in existing
        ]
        if clashes:
            raise ParseError(
                f"duplicate responses already stored: {clashes[:3]}",
                field="csv",
            )
        state.store.append_survey(responses)
        return {"stored": len(responses)}

    @app.get("/v1/analytics/support-usage")
    async def analytics_support_usage():
        kinds = {m.id: m.kind.value for m in state.catalog.materials}
        report = support_usage(state.telemetry.events, kinds)
        return {**report.to_dict(), "dwell": _dwell_summary(state)}

    @app.get("/v1/analytics/likert")
    async def analytics_likert():
        summaries = summarize_statements(state.store.load_survey())
        return {"statements": [s.to_dict() for s in summaries]}

    static_dir = state.config.static_dir
    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def _is_resend(
    session: ClassificationSession,
    node_id: str,
    answer: AnswerValue,
    justification: str | None,
) -> bool:
    """True when this answer repeats the most recent submission verbatim."""
    if session.status is not SessionStatus.DRAFT or not session.answers:
        return False
    last = session.answers[-1]
    if last.node_id != node_id:
        return False
    try:
        coerced = coerce_answer(session.graph.node(node_id), answer)
    except RiskwalkError:
        return False
    return last.answer == coerced and last.justification == justification


def _dwell_summary(state: AppState) -> dict:
    """Per-node dwell aggregated over every session in the telemetry log."""
    by_session: dict[str, list[InteractionEvent]] = {}
    for event in state.telemetry.events:
        by_session.setdefault(event.session_id, []).append(event)
    per_node: dict[str, dict] = {}
    for session_id, events in by_session.items():
        for node, seconds in dwell_times(events, session_id).items():
            stats = per_node.setdefault(
                node, {"sessions": 0, "total_seconds": 0.0}
            )
            stats["sessions"] += 1
            stats["total_seconds"] += seconds
    for stats in per_node.values():
        stats["mean_seconds"] = stats["total_seconds"] / stats["sessions"]
    return per_node


def serve(config: ServiceConfig) -> None:
    """Run the HTTP server; refuses to start on a broken bundle."""
    import uvicorn

    app = create_app(config)
    host, port = config.host_port
    uvicorn.run(app, host=host, port=port, log_level="info")
