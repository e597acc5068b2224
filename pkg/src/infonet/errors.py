"""Exception hierarchy shared by every model adapter.

Each exception carries a short machine-readable ``code``; the CLI maps the
three top-level families onto process exit codes.
"""

from __future__ import annotations


class InfonetError(Exception):
    code = "error"
    exit_code = 1

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict:
        out = {"code": self.code, "message": self.message}
        if self.details:
            out["details"] = self.details
        return out


class InvalidInput(InfonetError, ValueError):
    code = "invalid-input"
    exit_code = 2


class PreconditionFailure(InvalidInput):
    code = "precondition-failure"


class UndefinedOperation(InfonetError):
    """The operation is mathematically undefined for these (valid) inputs."""

    code = "undefined"
    exit_code = 3


class TotalConflict(UndefinedOperation):
    code = "total-conflict"


class UndefinedConditioning(UndefinedOperation):
    code = "undefined-conditioning"


class UndefinedUpdate(UndefinedOperation):
    code = "undefined-update"


class MissingProbability(UndefinedOperation):
    code = "missing-probability"


class CwaInconsistent(UndefinedOperation):
    code = "cwa-inconsistent"


class AuditIncomplete(UndefinedOperation):
    code = "audit-incomplete"


class BudgetExceeded(InfonetError):
    code = "budget-exceeded"
    exit_code = 4
