"""Error model: machine-readable code + human message + offending field.

Every failure surfaced to callers (library, CLI, HTTP) carries a stable code
so clients can branch on it without parsing messages.
"""

from __future__ import annotations


class RiskwalkError(Exception):
    """Base error with a stable machine-readable code."""

    code = "ERROR"

    def __init__(self, message: str, *, field: str | None = None):
        super().__init__(message)
        self.message = message
        self.field = field

    def to_dict(self) -> dict:
        out = {"code": self.code, "message": self.message}
        if self.field is not None:
            out["field"] = self.field
        return out


class ParseError(RiskwalkError):
    code = "PARSE_ERROR"


class ValidationError(RiskwalkError):
    """Raised when a graph document violates structural invariants."""

    code = "VALIDATION_ERROR"

    def __init__(self, message: str, violations=()):
        super().__init__(message)
        self.violations = list(violations)

    def to_dict(self) -> dict:
        out = super().to_dict()
        out["violations"] = [v.to_dict() for v in self.violations]
        return out


class InvalidPrefix(RiskwalkError):
    code = "INVALID_PREFIX"


class IllegalAnswer(RiskwalkError):
    code = "ILLEGAL_ANSWER"


class IncompletePath(RiskwalkError):
    code = "INCOMPLETE_PATH"


class UnknownNode(RiskwalkError):
    code = "UNKNOWN_NODE"


class DanglingAttachment(RiskwalkError):
    code = "DANGLING_ATTACHMENT"


class ExampleMismatch(RiskwalkError):
    code = "EXAMPLE_MISMATCH"


class TutorialNotConfirmed(RiskwalkError):
    code = "TUTORIAL_NOT_CONFIRMED"


class InvalidMetadata(RiskwalkError):
    code = "INVALID_METADATA"


class OutOfOrder(RiskwalkError):
    """Submitted node is not the session's current question."""

    code = "OUT_OF_ORDER"

    def __init__(self, message: str, *, current: str | None = None):
        super().__init__(message)
        self.current = current

    def to_dict(self) -> dict:
        out = super().to_dict()
        if self.current is not None:
            out["current"] = self.current
        return out


class SessionFinalized(RiskwalkError):
    code = "SESSION_FINALIZED"


class OutOfOrderTimestamp(RiskwalkError):
    code = "OUT_OF_ORDER_TS"


class UnknownMaterial(RiskwalkError):
    code = "UNKNOWN_MATERIAL"


class EmptyInput(RiskwalkError):
    code = "EMPTY_INPUT"


class DuplicateSubmission(RiskwalkError):
    code = "DUPLICATE_SUBMISSION"


class NotFound(RiskwalkError):
    code = "NOT_FOUND"


class ContentVersionMismatch(RiskwalkError):
    """Session was created under a different content bundle version."""

    code = "CONTENT_VERSION_MISMATCH"
