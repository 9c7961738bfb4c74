"""Shared exception types.

Verdicts that are data rather than control flow (pass / fail / exhausted
search) are returned as values by the modules that produce them; only
conditions that invalidate the surrounding computation are exceptions.
"""

from __future__ import annotations


class ParseError(ValueError):
    """Malformed source text. Carries a 1-based line and column."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


class Undecidable(Exception):
    """The oracle cannot decide a query within its horizon.

    Never a silent guess: callers either surface the verdict as
    "undecidable" or abort, but must not coerce it to a boolean.
    """

    def __init__(self, predicate_text: str, horizon: int, detail: str = ""):
        msg = f"undecidable at horizon {horizon}: {predicate_text[:200]}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.predicate_text = predicate_text
        self.horizon = horizon
        self.detail = detail


class ConsistencyViolation(Exception):
    """A committed filter invariant was discovered broken."""


class ReplayMismatch(Exception):
    """A recomputed decision differs from the recorded one."""


class MalformedIndicator(Exception):
    """A value that must be a 0/1 indicator is neither."""


class NotSupported(Exception):
    """The extension lacks the structure the operation needs."""


class NotRepresentable(Exception):
    """A table does not satisfy the constancy precondition."""
