"""Decision-support toolkit for EU AI Act risk classification.

A validated decision graph walks a system through scope, definition,
prohibition, high-risk and transparency questions; sessions are
event-sourced; telemetry and Likert analytics summarize how the tool is
used; an HTTP service and CLI expose the whole thing.
"""

from .content import (
    SupportCatalog,
    SupportKind,
    SupportMaterial,
    WorkedExample,
    fill_expert_contact,
    load_bundle_files,
    load_content_bundle,
    shipped_bundle,
)
from .errors import RiskwalkError
from .graph import (
    TERMINAL,
    AnswerMode,
    AnswerValue,
    DecisionGraph,
    QuestionNode,
    RiskCategory,
    RiskLabel,
    RiskOutcomeSet,
    TransparencyBasis,
    ValidationReport,
    ViolationKind,
    classify,
    enumerate_paths,
    load_graph,
    load_graph_file,
    next_question,
    validate_graph,
)
from .likert import (
    LikertResponse,
    StatementSummary,
    interpolated_median,
    parse_survey_csv,
    percent_favourable,
    summarize_statements,
)
from .service import ServiceConfig, create_app
from .session import (
    ClassificationReport,
    ClassificationSession,
    SessionEvent,
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
    EventLog,
    InteractionEvent,
    InteractionKind,
    dwell_times,
    record_event,
    support_usage,
)

__all__ = [
    "AnswerMode",
    "AnswerValue",
    "ClassificationReport",
    "ClassificationSession",
    "DecisionGraph",
    "EventLog",
    "FileStore",
    "InteractionEvent",
    "InteractionKind",
    "LikertResponse",
    "QuestionNode",
    "RiskCategory",
    "RiskLabel",
    "RiskOutcomeSet",
    "RiskwalkError",
    "ServiceConfig",
    "SessionEvent",
    "StatementSummary",
    "SupportCatalog",
    "SupportKind",
    "SupportMaterial",
    "SystemMetadata",
    "TERMINAL",
    "TransparencyBasis",
    "ValidationReport",
    "ViolationKind",
    "WorkedExample",
    "build_report",
    "classify",
    "create_app",
    "dwell_times",
    "enumerate_paths",
    "fill_expert_contact",
    "finalize",
    "interpolated_median",
    "load_bundle_files",
    "load_content_bundle",
    "load_graph",
    "load_graph_file",
    "next_question",
    "parse_survey_csv",
    "percent_favourable",
    "record_event",
    "replay_session",
    "revise_answer",
    "shipped_bundle",
    "start_session",
    "submit_answer",
    "summarize_statements",
    "support_usage",
    "validate_graph",
]
