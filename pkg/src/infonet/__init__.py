"""Imperfect-information models (probability, evidence, rough sets,
possibility, defaults, epistemic logic, vague predicates, retrieval)
connected through classifications and infomorphisms."""

from .errors import (
    AuditIncomplete, BudgetExceeded, CwaInconsistent, InfonetError, InvalidInput,
    MissingProbability, PreconditionFailure, TotalConflict, UndefinedConditioning,
    UndefinedOperation, UndefinedUpdate,
)

__version__ = "0.1.0"

__all__ = [
    "AuditIncomplete", "BudgetExceeded", "CwaInconsistent", "InfonetError", "InvalidInput",
    "MissingProbability", "PreconditionFailure", "TotalConflict", "UndefinedConditioning",
    "UndefinedOperation", "UndefinedUpdate", "__version__",
]
