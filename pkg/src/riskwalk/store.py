"""File-backed persistence: append-only logs plus a small submission index.

Layout under the data directory:

    sessions/<session_id>.ndjson    session events, one record per line
    telemetry/<YYYY-MM-DD>.ndjson   interaction events by UTC day
    surveys.ndjson                  survey responses
    submissions.json                user_ref bookkeeping for single submission

Every acknowledged append is flushed and fsynced before returning. A crash
can leave at most one torn final line per file; readers drop it. A torn
line anywhere else means external corruption and is reported, not skipped.
"""

from __future__ import annotations

import json
import os
import re
import threading
from collections.abc import Iterator
from pathlib import Path

from .errors import NotFound, ParseError
from .likert import LikertResponse, NO_RECALL, parse_value
from .session import SessionEvent
from .telemetry import InteractionEvent

_SAFE_ID = re.compile(r"^[A-Za-z0-9_-]+$")


def _append_record(path: Path, record: dict) -> None:
    line = json.dumps(record, separators=(",", ":"), sort_keys=True)
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(line + "\n")
        fh.flush()
        os.fsync(fh.fileno())


def read_ndjson(path: Path) -> list[dict]:
    """Read NDJSON, tolerating a torn final line from an interrupted append."""
    if not path.exists():
        return []
    raw_lines = path.read_text(encoding="utf-8").splitlines()
    records = []
    for index, line in enumerate(raw_lines):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError:
            if index == len(raw_lines) - 1:
                break
            raise ParseError(f"{path.name}: corrupt record at line {index + 1}")
    return records


def _write_json_atomic(path: Path, payload: dict) -> None:
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


class FileStore:
    """Synchronous file persistence for sessions, telemetry and surveys."""

    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        self.sessions_dir = self.root / "sessions"
        self.telemetry_dir = self.root / "telemetry"
        self.surveys_path = self.root / "surveys.ndjson"
        self.submissions_path = self.root / "submissions.json"
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self.telemetry_dir.mkdir(parents=True, exist_ok=True)
        self._submissions_lock = threading.Lock()

    # -- sessions ----------------------------------------------------------

    def _session_path(self, session_id: str) -> Path:
        if not _SAFE_ID.match(session_id or ""):
            raise NotFound(f"no session {session_id!r}", field="session_id")
        return self.sessions_dir / f"{session_id}.ndjson"

    def append_session_event(self, event: SessionEvent) -> None:
        _append_record(self._session_path(event.session_id), event.to_record())

    def session_exists(self, session_id: str) -> bool:
        try:
            return self._session_path(session_id).exists()
        except NotFound:
            return False

    def load_session_events(self, session_id: str) -> list[SessionEvent]:
        path = self._session_path(session_id)
        if not path.exists():
            raise NotFound(f"no session {session_id!r}", field="session_id")
        return [SessionEvent.from_record(r) for r in read_ndjson(path)]

    def list_sessions(self) -> list[str]:
        return sorted(p.stem for p in self.sessions_dir.glob("*.ndjson"))

    # -- telemetry ---------------------------------------------------------

    def append_interaction(self, event: InteractionEvent) -> None:
        day = event.ts.date().isoformat()
        _append_record(self.telemetry_dir / f"{day}.ndjson", event.to_record())

    def iter_interactions(self) -> Iterator[InteractionEvent]:
        for path in sorted(self.telemetry_dir.glob("*.ndjson")):
            for record in read_ndjson(path):
                yield InteractionEvent.from_record(record)

    # -- surveys -----------------------------------------------------------

    def append_survey(self, responses: list[LikertResponse]) -> None:
        for response in responses:
            _append_record(
                self.surveys_path,
                {
                    "respondent_id": response.respondent_id,
                    "statement_id": response.statement_id,
                    "value": NO_RECALL if response.value is None else response.value,
                },
            )

    def load_survey(self) -> list[LikertResponse]:
        responses = []
        for record in read_ndjson(self.surveys_path):
            responses.append(
                LikertResponse(
                    respondent_id=str(record["respondent_id"]),
                    statement_id=str(record["statement_id"]),
                    value=parse_value(str(record["value"])),
                )
            )
        return responses

    # -- single submission index ------------------------------------------

    def _load_submissions(self) -> dict:
        if not self.submissions_path.exists():
            return {"by_session": {}, "finalized": {}}
        try:
            data = json.loads(self.submissions_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError("submissions.json is corrupt") from exc
        data.setdefault("by_session", {})
        data.setdefault("finalized", {})
        return data

    def claim_session(self, session_id: str, user_ref: str) -> None:
        """Associate a draft session with the submitting user."""
        with self._submissions_lock:
            data = self._load_submissions()
            data["by_session"][session_id] = user_ref
            _write_json_atomic(self.submissions_path, data)

    def user_for_session(self, session_id: str) -> str | None:
        with self._submissions_lock:
            return self._load_submissions()["by_session"].get(session_id)

    def finalized_session_for(self, user_ref: str) -> str | None:
        with self._submissions_lock:
            return self._load_submissions()["finalized"].get(user_ref)

    def mark_finalized(self, session_id: str) -> None:
        with self._submissions_lock:
            data = self._load_submissions()
            user_ref = data["by_session"].get(session_id)
            if user_ref is not None:
                data["finalized"][user_ref] = session_id
                _write_json_atomic(self.submissions_path, data)
