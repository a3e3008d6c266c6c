"""Append-only audit log.

Every consequential act in the system lands here as one row: who did it,
what they did, to which record, with what detail. Rows are ordinary store
records (kind "audit") so they share persistence and canonical encoding
with everything else, and they are never updated or deleted by any code
path in this package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone

from provost.core.registry import record
from provost.core.store import Store

#: actor recorded for rows produced by unattended automation
SYSTEM_ACTOR = "system"


@record
@dataclass(frozen=True)
class AuditEvent:
    KIND = "audit"
    seq: int
    actor: str
    action: str
    subject: str
    at: datetime
    detail: dict = field(default_factory=dict)

    def storage_key(self) -> str:
        return f"a{self.seq:08d}"

    def to_payload(self) -> dict:
        return {
            "seq": self.seq,
            "actor": self.actor,
            "action": self.action,
            "subject": self.subject,
            "at": self.at.isoformat(),
            "detail": self.detail,
        }

    @classmethod
    def from_payload(cls, p: dict) -> "AuditEvent":
        return cls(
            seq=int(p["seq"]),
            actor=p["actor"],
            action=p["action"],
            subject=p["subject"],
            at=datetime.fromisoformat(p["at"]),
            detail=dict(p.get("detail", {})),
        )

    def field_errors(self):
        errors: list = []
        if not self.action:
            errors.append(("action", "must be non-empty"))
        if not self.actor:
            errors.append(("actor", "must be non-empty"))
        return errors


def append_audit(
    store: Store,
    *,
    actor: str,
    action: str,
    subject: str,
    detail: dict | None = None,
    at: datetime | None = None,
) -> AuditEvent:
    """Append one audit row; seq assignment and insert happen under one
    lock hold so rows never collide."""
    with store.locked():
        seq = len(store.list("audit")) + 1
        event = AuditEvent(
            seq=seq,
            actor=actor,
            action=action,
            subject=subject,
            at=at if at is not None else datetime.now(timezone.utc),
            detail=detail or {},
        )
        store.upsert(event)
    return event


def audit_trail(
    store: Store,
    *,
    subject: str | None = None,
    action: str | None = None,
    actor: str | None = None,
) -> list[AuditEvent]:
    """Audit rows in insertion order, optionally filtered."""
    rows = store.list("audit")
    if subject is not None:
        rows = [r for r in rows if r.subject == subject]
    if action is not None:
        rows = [r for r in rows if r.action == action]
    if actor is not None:
        rows = [r for r in rows if r.actor == actor]
    return sorted(rows, key=lambda r: r.seq)
