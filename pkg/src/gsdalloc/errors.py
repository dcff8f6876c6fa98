"""Exception types and the validation-finding record shared across modules."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Finding:
    """One validation result: machine-readable code plus the offending locus."""

    code: str
    message: str
    locus: tuple[str, ...] = ()

    def __str__(self) -> str:
        where = f" at {'/'.join(self.locus)}" if self.locus else ""
        return f"{self.code}{where}: {self.message}"


class GsdallocError(Exception):
    """Base class; `code` is stable for programmatic handling."""

    code = "ERROR"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class ValidationError(GsdallocError):
    """Raised when an operation requires a clean model/characterization but got findings."""

    code = "VALIDATION"

    def __init__(self, findings: list[Finding], message: str | None = None):
        self.findings = list(findings)
        summary = message or "; ".join(str(f) for f in self.findings)
        super().__init__(summary)


class RuleParseError(GsdallocError):
    code = "PARSE_ERROR"

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.reason = message


class UnknownFactorError(GsdallocError):
    code = "UNKNOWN_FACTOR"


class UnboundFactorError(GsdallocError):
    code = "UNBOUND_FACTOR"


class SkeletonError(GsdallocError):
    code = "UNLINKED_PROBLEM"


class InferenceError(GsdallocError):
    code = "INFERENCE"


class InconsistentEvidenceError(InferenceError):
    code = "INCONSISTENT_EVIDENCE"


class InfeasibleError(GsdallocError):
    code = "INFEASIBLE_PROJECT"


class SchemaError(GsdallocError):
    """File content does not match the expected schema."""

    code = "SCHEMA_ERROR"

    def __init__(self, message: str, findings: list[Finding] | None = None):
        super().__init__(message)
        self.findings = findings or [Finding("SCHEMA_ERROR", message)]


class IoError(GsdallocError):
    code = "IO_ERROR"
