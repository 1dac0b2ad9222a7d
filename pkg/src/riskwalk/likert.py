"""Likert survey analytics: Interpolated Median and Percent Favourable.

Responses use the 1..5 agreement scale plus a no-recall marker ("NR").
No-recall answers are excluded from every numerator and denominator; only
substantive responses count.
"""

from __future__ import annotations

import csv
import io
import statistics
from collections.abc import Iterable
from dataclasses import dataclass

from .errors import EmptyInput, ParseError

NO_RECALL = "NR"
SCALE = (1, 2, 3, 4, 5)
FAVOURABLE = {4, 5}


@dataclass(frozen=True)
class LikertResponse:
    respondent_id: str
    statement_id: str
    value: int | None  # None encodes no recall

    @property
    def is_substantive(self) -> bool:
        return self.value is not None


def parse_value(raw: str) -> int | None:
    """Parse a survey cell: "1".."5" or the no-recall marker."""
    text = raw.strip()
    if text.upper() == NO_RECALL:
        return None
    try:
        value = int(text)
    except ValueError:
        raise ParseError(f"bad survey value {raw!r}", field="value") from None
    if value not in SCALE:
        raise ParseError(f"survey value {value} outside 1..5", field="value")
    return value


def substantive(values: Iterable[int | None]) -> list[int]:
    return [v for v in values if v is not None]


def interpolated_median(values: Iterable[int | None]) -> float:
    """Grouped median with unit-width classes and half-integer boundaries.

    With m the plain median, N the substantive count, cb the count strictly
    below m and cm the count at m: IM = (m - 0.5) + (N/2 - cb) / cm. When no
    response sits exactly at m (half-integer medians), the plain median is
    already the right summary and is returned as-is.

    Raises:
        EmptyInput: no substantive responses.
    """
    subs = substantive(values)
    if not subs:
        raise EmptyInput("interpolated median needs at least one substantive response")
    m = statistics.median(subs)
    cm = sum(1 for v in subs if v == m)
    if cm == 0:
        return float(m)
    cb = sum(1 for v in subs if v < m)
    return (m - 0.5) + (len(subs) / 2 - cb) / cm


def percent_favourable(values: Iterable[int | None]) -> float:
    """Share of substantive responses that agree or strongly agree (4 or 5).

    Raises:
        EmptyInput: no substantive responses.
    """
    subs = substantive(values)
    if not subs:
        raise EmptyInput("percent favourable needs at least one substantive response")
    return sum(1 for v in subs if v in FAVOURABLE) / len(subs)


@dataclass(frozen=True)
class StatementSummary:
    statement_id: str
    n_substantive: int
    interpolated_median: float
    percent_favourable: float

    def to_dict(self) -> dict:
        return {
            "statement_id": self.statement_id,
            "n_substantive": self.n_substantive,
            "interpolated_median": self.interpolated_median,
            "percent_favourable": self.percent_favourable,
        }


def summarize_statements(
    responses: Iterable[LikertResponse],
) -> list[StatementSummary]:
    """One summary per statement, sorted by statement id.

    Statements whose responses are all no-recall are omitted: there is
    nothing substantive to summarize.
    """
    by_statement: dict[str, list[int | None]] = {}
    for response in responses:
        by_statement.setdefault(response.statement_id, []).append(response.value)
    summaries = []
    for statement_id in sorted(by_statement):
        values = by_statement[statement_id]
        subs = substantive(values)
        if not subs:
            continue
        summaries.append(
            StatementSummary(
                statement_id=statement_id,
                n_substantive=len(subs),
                interpolated_median=interpolated_median(values),
                percent_favourable=percent_favourable(values),
            )
        )
    return summaries


SURVEY_COLUMNS = ("respondent_id", "statement_id", "value")


def parse_survey_csv(text: str) -> list[LikertResponse]:
    """Parse survey rows from CSV with a respondent_id,statement_id,value header.

    Raises:
        ParseError: missing columns, bad values, or a duplicate
            (respondent, statement) pair.
    """
    reader = csv.DictReader(io.StringIO(text))
    fields = [f.strip().lower() for f in reader.fieldnames or ()]
    if not set(SURVEY_COLUMNS) <= set(fields):
        raise ParseError(
            f"survey header must contain columns {', '.join(SURVEY_COLUMNS)}"
        )
    responses: list[LikertResponse] = []
    seen: set[tuple[str, str]] = set()
    for line_no, row in enumerate(reader, start=2):
        normalized = {(k or "").strip().lower(): (v or "") for k, v in row.items()}
        respondent = normalized["respondent_id"].strip()
        statement = normalized["statement_id"].strip()
        if not respondent or not statement:
            raise ParseError(f"survey line {line_no}: empty id", field="respondent_id")
        key = (respondent, statement)
        if key in seen:
            raise ParseError(
                f"survey line {line_no}: duplicate response for {key}",
                field="respondent_id",
            )
        seen.add(key)
        try:
            value = parse_value(normalized["value"])
        except ParseError as exc:
            raise ParseError(f"survey line {line_no}: {exc.message}", field="value") from None
        responses.append(
            LikertResponse(respondent_id=respondent, statement_id=statement, value=value)
        )
    return responses
