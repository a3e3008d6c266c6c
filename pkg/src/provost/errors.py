"""Exception hierarchy shared by every module.

Each class maps to one error family surfaced at the CLI (exit codes) and the
HTTP service (status codes); `field` pins validation errors to the offending
field so callers can render precise messages.
"""

from __future__ import annotations


class ProvostError(Exception):
    """Base class for all engine errors."""

    code = "internal"

    def __init__(self, message: str, *, field: str | None = None):
        super().__init__(message)
        self.message = message
        self.field = field

    def to_payload(self) -> dict:
        payload = {"code": self.code, "message": self.message}
        if self.field is not None:
            payload["field"] = self.field
        return payload


class ValidationError(ProvostError):
    """A record or argument violates a type invariant."""

    code = "validation"


class IntegrityError(ProvostError):
    """A reference points at a (kind, key) that does not exist."""

    code = "integrity"


class NotFoundError(ProvostError):
    """Lookup of a required record failed."""

    code = "not_found"


class ConflictError(ProvostError):
    """Operation raced or repeated against an already-settled state."""

    code = "conflict"


class ConfigurationError(ProvostError):
    """Bad configuration detected at load time, never at call time."""

    code = "configuration"


class AdapterError(ProvostError):
    """A pluggable adapter (extractor, grader, planner) failed."""

    code = "adapter"

    def __init__(self, message: str, *, adapter_id: str | None = None, field: str | None = None):
        super().__init__(message, field=field)
        self.adapter_id = adapter_id


class RoleError(ProvostError):
    """Actor lacks the role required for the action."""

    code = "forbidden"
