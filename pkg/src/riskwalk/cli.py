"""Operator command line: validate, paths, classify, analyze, serve.

Exit codes: 0 success, 1 content violations or failed rows, 2 unreadable
or unparsable input.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path

import click

from .content import load_bundle_files, shipped_graph_path
from .errors import (
    DanglingAttachment,
    ExampleMismatch,
    IncompletePath,
    ParseError,
    RiskwalkError,
    ValidationError,
)
from .graph import TERMINAL, AnswerValue, classify, enumerate_paths, next_question
from .likert import LikertResponse, parse_survey_csv, parse_value, summarize_statements
from .service import ServiceConfig, serve
from .store import read_ndjson
from .telemetry import InteractionEvent, dwell_times, support_usage

FORMATS = ("table", "csv", "json")


def _emit_table(rows: list[dict], columns: list[str]) -> str:
    widths = {c: len(c) for c in columns}
    for row in rows:
        for c in columns:
            widths[c] = max(widths[c], len(str(row.get(c, ""))))
    lines = ["  ".join(c.ljust(widths[c]) for c in columns)]
    for row in rows:
        lines.append("  ".join(str(row.get(c, "")).ljust(widths[c]) for c in columns))
    return "\n".join(lines)


def _emit_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: row.get(c, "") for c in columns})
    return buf.getvalue().rstrip("\n")


def _emit(rows: list[dict], columns: list[str], fmt: str, payload: dict) -> None:
    if fmt == "json":
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    elif fmt == "csv":
        click.echo(_emit_csv(rows, columns))
    else:
        click.echo(_emit_table(rows, columns))


def _load_bundle(ctx: click.Context):
    bundle = ctx.obj["bundle"] or shipped_graph_path()
    try:
        return load_bundle_files(bundle)
    except ValidationError as exc:
        for violation in exc.violations:
            click.echo(str(violation), err=True)
        ctx.exit(1)
    except (DanglingAttachment, ExampleMismatch) as exc:
        click.echo(f"{exc.code}: {exc.message}", err=True)
        ctx.exit(1)
    except RiskwalkError as exc:
        click.echo(f"{exc.code}: {exc.message}", err=True)
        ctx.exit(2)


@click.group()
@click.option(
    "--bundle",
    type=click.Path(path_type=Path),
    default=None,
    help="Graph JSON file; its support catalog sits next to it. Defaults to the shipped bundle.",
)
@click.option(
    "--data-dir",
    type=click.Path(path_type=Path),
    default=Path("data"),
    show_default=True,
    help="Service data directory (sessions, telemetry, surveys).",
)
@click.option(
    "--format",
    "fmt",
    type=click.Choice(FORMATS),
    default="table",
    show_default=True,
    help="Output format for tabular commands.",
)
@click.pass_context
def main(ctx: click.Context, bundle: Path | None, data_dir: Path, fmt: str) -> None:
    """Decision-support tooling for AI Act risk classification content."""
    ctx.obj = {"bundle": bundle, "data_dir": data_dir, "format": fmt}


@main.command()
@click.pass_context
def validate(ctx: click.Context) -> None:
    """Check the content bundle; exit 0 only when fully clean."""
    graph, catalog = _load_bundle(ctx)
    click.echo(
        f"ok: {graph.version} ({len(graph.nodes)} nodes, {len(graph.rules)} rules, "
        f"{len(catalog.materials)} materials, {len(catalog.examples)} examples)"
    )


@main.command()
@click.pass_context
def paths(ctx: click.Context) -> None:
    """Enumerate every binarized path with its outcome."""
    graph, _ = _load_bundle(ctx)
    table = enumerate_paths(graph)
    rows = []
    for path, outcome in table:
        rows.append(
            {
                "path": " ".join(f"{node}={branch}" for node, branch in path),
                "outcome": "+".join(str(l.label) for l in outcome.labels),
            }
        )
    fmt = ctx.obj["format"]
    payload = {"paths": rows, "total": len(rows)}
    _emit(rows, ["path", "outcome"], fmt, payload)
    if fmt == "table":
        click.echo(f"total paths: {len(rows)}")


def _classify_row(graph, row: dict):
    history = []
    node_id = graph.start
    while node_id != TERMINAL:
        if node_id not in row:
            raise IncompletePath(f"missing answer for {node_id}")
        history.append((node_id, AnswerValue.from_json(row[node_id])))
        node_id = next_question(graph, history)
    return classify(graph, history)


@main.command("classify")
@click.argument("answers_file", type=click.Path(path_type=Path))
@click.pass_context
def classify_cmd(ctx: click.Context, answers_file: Path) -> None:
    """Classify answer vectors from a file, one JSON object per line.

    Each line maps question ids to answers, e.g.
    {"Q1a": "yes", "Q1b": [], ...}. Failed rows are reported with their
    line numbers; the command exits 1 if any row failed.
    """
    graph, _ = _load_bundle(ctx)
    try:
        lines = answers_file.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        click.echo(f"cannot read {answers_file}: {exc}", err=True)
        ctx.exit(2)
    rows = []
    reports = []
    failed = 0
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            if not isinstance(raw, dict):
                raise ParseError("row must be a JSON object")
            outcome = _classify_row(graph, raw)
        except (RiskwalkError, json.JSONDecodeError) as exc:
            failed += 1
            message = exc.message if isinstance(exc, RiskwalkError) else str(exc)
            code = exc.code if isinstance(exc, RiskwalkError) else "PARSE_ERROR"
            rows.append({"row": line_no, "outcome": f"error: {code}", "detail": message})
            reports.append({"row": line_no, "error": {"code": code, "message": message}})
            continue
        rows.append(
            {
                "row": line_no,
                "outcome": "+".join(str(l.label) for l in outcome.labels),
                "detail": "; ".join(
                    f"{e.node_id}={e.answer}" for e in outcome.rationale
                ),
            }
        )
        reports.append({"row": line_no, "result": outcome.to_dict()})
    _emit(rows, ["row", "outcome", "detail"], ctx.obj["format"], {"reports": reports})
    if failed:
        ctx.exit(1)


def _load_survey_file(path: Path) -> list[LikertResponse]:
    if path.suffix == ".ndjson":
        responses = []
        for record in read_ndjson(path):
            responses.append(
                LikertResponse(
                    respondent_id=str(record["respondent_id"]),
                    statement_id=str(record["statement_id"]),
                    value=parse_value(str(record["value"])),
                )
            )
        return responses
    return parse_survey_csv(path.read_text(encoding="utf-8"))


@main.command()
@click.option(
    "--telemetry",
    "telemetry_dir",
    type=click.Path(path_type=Path),
    default=None,
    help="Telemetry NDJSON directory. Defaults to <data-dir>/telemetry.",
)
@click.option(
    "--survey",
    "survey_file",
    type=click.Path(path_type=Path),
    default=None,
    help="Survey file (.csv with header, or .ndjson). Defaults to <data-dir>/surveys.ndjson.",
)
@click.pass_context
def analyze(ctx: click.Context, telemetry_dir: Path | None, survey_file: Path | None) -> None:
    """Summarize support usage, dwell time, and survey statements."""
    graph, catalog = _load_bundle(ctx)
    fmt = ctx.obj["format"]
    data_dir: Path = ctx.obj["data_dir"]
    telemetry_dir = telemetry_dir or data_dir / "telemetry"
    if survey_file is None:
        candidate = data_dir / "surveys.ndjson"
        survey_file = candidate if candidate.exists() else None

    events: list[InteractionEvent] = []
    if telemetry_dir.is_dir():
        try:
            for path in sorted(telemetry_dir.glob("*.ndjson")):
                for record in read_ndjson(path):
                    events.append(InteractionEvent.from_record(record))
        except (RiskwalkError, OSError) as exc:
            click.echo(f"cannot read telemetry: {exc}", err=True)
            ctx.exit(2)
    elif telemetry_dir != data_dir / "telemetry":
        click.echo(f"telemetry directory {telemetry_dir} not found", err=True)
        ctx.exit(2)

    kinds = {m.id: m.kind.value for m in catalog.materials}
    usage = support_usage(events, kinds)
    usage_rows = [
        {
            "kind": k.kind,
            "users_with_access": round(k.share * usage.total_users),
            "share_percent": f"{k.share * 100:.2f}",
            "histogram": json.dumps(k.to_dict()["histogram"]),
        }
        for k in usage.kinds
    ]

    by_session: dict[str, list[InteractionEvent]] = {}
    for event in events:
        by_session.setdefault(event.session_id, []).append(event)
    dwell_acc: dict[str, dict] = {}
    for session_id, session_events in by_session.items():
        for node, seconds in dwell_times(session_events, session_id).items():
            stats = dwell_acc.setdefault(node, {"sessions": 0, "total": 0.0})
            stats["sessions"] += 1
            stats["total"] += seconds
    dwell_rows = [
        {
            "node": node,
            "sessions": stats["sessions"],
            "mean_seconds": f"{stats['total'] / stats['sessions']:.1f}",
        }
        for node, stats in sorted(dwell_acc.items())
    ]

    survey_rows = []
    statements = []
    if survey_file is not None:
        try:
            responses = _load_survey_file(survey_file)
        except (RiskwalkError, OSError, KeyError) as exc:
            click.echo(f"cannot read survey: {exc}", err=True)
            ctx.exit(2)
        statements = summarize_statements(responses)
        survey_rows = [
            {
                "statement": s.statement_id,
                "n": s.n_substantive,
                "interpolated_median": f"{s.interpolated_median:.2f}",
                "percent_favourable": f"{s.percent_favourable * 100:.1f}",
            }
            for s in statements
        ]

    if fmt == "json":
        click.echo(
            json.dumps(
                {
                    "support_usage": usage.to_dict(),
                    "dwell": dwell_rows,
                    "likert": [s.to_dict() for s in statements],
                },
                indent=2,
                sort_keys=True,
            )
        )
        return
    emit = _emit_csv if fmt == "csv" else _emit_table
    click.echo("# support usage")
    click.echo(emit(usage_rows, ["kind", "users_with_access", "share_percent", "histogram"]))
    click.echo("# dwell time")
    click.echo(emit(dwell_rows, ["node", "sessions", "mean_seconds"]))
    if survey_rows:
        click.echo("# survey")
        click.echo(emit(survey_rows, ["statement", "n", "interpolated_median", "percent_favourable"]))


@main.command("serve")
@click.option("--listen", default=None, help="host:port to bind (env LISTEN_ADDR).")
@click.option("--expert-name", default=None, help="Expert contact name for support materials.")
@click.option("--expert-email", default=None, help="Expert contact email for support materials.")
@click.option(
    "--enforce-single-submission/--no-enforce-single-submission",
    default=None,
    help="Refuse a second finalized submission per user_ref.",
)
@click.option(
    "--static-dir",
    type=click.Path(path_type=Path),
    default=None,
    help="Built frontend directory to serve at / (env FRONTEND_DIST).",
)
@click.pass_context
def serve_cmd(
    ctx: click.Context,
    listen: str | None,
    expert_name: str | None,
    expert_email: str | None,
    enforce_single_submission: bool | None,
    static_dir: Path | None,
) -> None:
    """Run the HTTP service."""
    base = ServiceConfig.from_env()
    config = ServiceConfig(
        listen_addr=listen or base.listen_addr,
        data_dir=ctx.obj["data_dir"] if ctx.obj["data_dir"] != Path("data") else base.data_dir,
        content_bundle=ctx.obj["bundle"] or base.content_bundle,
        expert_contact_name=expert_name or base.expert_contact_name,
        expert_contact_email=expert_email or base.expert_contact_email,
        enforce_single_submission=(
            base.enforce_single_submission
            if enforce_single_submission is None
            else enforce_single_submission
        ),
        static_dir=static_dir or base.static_dir,
    )
    try:
        serve(config)
    except RiskwalkError as exc:
        click.echo(f"{exc.code}: {exc.message}", err=True)
        ctx.exit(2)


if __name__ == "__main__":
    main()
