"""Autonomy gating for workflow actions.

Every mutating tool call passes through gate_checkpoint before executing.
Reads always proceed. A pending approval that matches the action is
consumed and lets the action through at any level. Otherwise the autonomy
level and checkpoint policy decide:

  levels 0..2   block every mutating action (the policy is forced to
                pause_before_publish or stricter at load)
  level 3       policy none proceeds; pause_before_publish blocks publish
                actions; pause_before_each_action blocks all mutating
  level 4       proceeds, logging an override audit row
  level 5       never reaches here; rejected at configuration load

Blocked actions leave a PendingApproval behind so a human can release
exactly that action later.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import TYPE_CHECKING

from provost.core.audit import SYSTEM_ACTOR, append_audit
from provost.core.registry import record
from provost.core.store import Store
from provost.errors import ConflictError, IntegrityError

if TYPE_CHECKING:
    from provost.workflows.definitions import WorkflowDefinition


class CheckpointPolicy(str, Enum):
    NONE = "none"
    PAUSE_BEFORE_PUBLISH = "pause_before_publish"
    PAUSE_BEFORE_EACH_ACTION = "pause_before_each_action"


class ApprovalStatus(str, Enum):
    PENDING = "pending"
    APPROVED = "approved"
    CONSUMED = "consumed"
    REJECTED = "rejected"


@record
@dataclass(frozen=True)
class PendingApproval:
    KIND = "approval"

    approval_id: str
    workflow_id: str
    action: str  # tool name
    action_kind: str  # "write" | "publish"
    requested_at: datetime
    status: ApprovalStatus = ApprovalStatus.PENDING
    payload: dict = field(default_factory=dict)
    decided_by: str | None = None

    def storage_key(self) -> str:
        return self.approval_id

    def to_payload(self) -> dict:
        return {
            "approval_id": self.approval_id,
            "workflow_id": self.workflow_id,
            "action": self.action,
            "action_kind": self.action_kind,
            "requested_at": self.requested_at.isoformat(),
            "status": self.status.value,
            "payload": self.payload,
            "decided_by": self.decided_by,
        }

    @classmethod
    def from_payload(cls, data: dict) -> "PendingApproval":
        return cls(
            approval_id=data["approval_id"],
            workflow_id=data["workflow_id"],
            action=data["action"],
            action_kind=data["action_kind"],
            requested_at=datetime.fromisoformat(data["requested_at"]),
            status=ApprovalStatus(data["status"]),
            payload=dict(data.get("payload", {})),
            decided_by=data.get("decided_by"),
        )

    def field_errors(self):
        errors = []
        if self.action_kind not in ("write", "publish"):
            errors.append(("action_kind", f"unknown action kind {self.action_kind!r}"))
        if self.status in (ApprovalStatus.APPROVED, ApprovalStatus.REJECTED, ApprovalStatus.CONSUMED):
            if not self.decided_by:
                errors.append(("decided_by", f"{self.status.value} approval needs decided_by"))
        return errors


@dataclass(frozen=True)
class GateDecision:
    proceed: bool
    pending: PendingApproval | None = None
    override_logged: bool = False
    consumed_approval: str | None = None


def _next_approval_id(store: Store) -> str:
    return f"ap{len(store.list('approval')) + 1:06d}"


def _matching_approval(
    store: Store, workflow_id: str, action: str, payload: dict, status: ApprovalStatus
) -> PendingApproval | None:
    for approval in store.list("approval"):
        if approval.status is not status:
            continue
        if approval.workflow_id == workflow_id and approval.action == action:
            if approval.payload == payload:
                return approval
    return None


def gate_checkpoint(
    store: Store,
    definition: "WorkflowDefinition",
    action: str,
    action_kind: str,
    payload: dict | None = None,
    now: datetime | None = None,
) -> GateDecision:
    """Decide whether a workflow action may proceed right now."""
    if action_kind == "read":
        return GateDecision(proceed=True)
    payload = payload or {}
    now = now or datetime.now(timezone.utc)
    with store.locked():
        approval = _matching_approval(
            store, definition.workflow_id, action, payload, ApprovalStatus.APPROVED
        )
        if approval is not None:
            store.upsert(
                PendingApproval(
                    approval_id=approval.approval_id,
                    workflow_id=approval.workflow_id,
                    action=approval.action,
                    action_kind=approval.action_kind,
                    requested_at=approval.requested_at,
                    status=ApprovalStatus.CONSUMED,
                    payload=approval.payload,
                    decided_by=approval.decided_by,
                )
            )
            return GateDecision(proceed=True, consumed_approval=approval.approval_id)

        level = definition.autonomy_level
        policy = definition.checkpoint_policy
        blocked = (
            level <= 2
            or (level == 3 and policy is CheckpointPolicy.PAUSE_BEFORE_EACH_ACTION)
            or (
                level == 3
                and policy is CheckpointPolicy.PAUSE_BEFORE_PUBLISH
                and action_kind == "publish"
            )
        )
        if not blocked:
            override = level == 4
            if override:
                append_audit(
                    store,
                    actor=SYSTEM_ACTOR,
                    action="workflow.override",
                    subject=f"{definition.workflow_id}:{action}",
                    at=now,
                    detail={"action_kind": action_kind, "level": level},
                )
            return GateDecision(proceed=True, override_logged=override)

        # re-blocking the same action reuses its open approval, so retries
        # never pile up duplicate requests in the review queue
        pending = _matching_approval(
            store, definition.workflow_id, action, payload, ApprovalStatus.PENDING
        )
        if pending is None:
            pending = PendingApproval(
                approval_id=_next_approval_id(store),
                workflow_id=definition.workflow_id,
                action=action,
                action_kind=action_kind,
                requested_at=now,
                status=ApprovalStatus.PENDING,
                payload=payload,
            )
            store.upsert(pending)
        return GateDecision(proceed=False, pending=pending)


def decide_approval(
    store: Store, approval_id: str, approve: bool, actor: str, now: datetime | None = None
) -> PendingApproval:
    """A human releases or rejects a pending approval."""
    now = now or datetime.now(timezone.utc)
    with store.locked():
        current = store.get("approval", approval_id)
        if current is None:
            raise IntegrityError(f"no approval {approval_id}", field="approval_id")
        if current.status is not ApprovalStatus.PENDING:
            raise ConflictError(
                f"approval {approval_id} already {current.status.value}", field="status"
            )
        decided = PendingApproval(
            approval_id=current.approval_id,
            workflow_id=current.workflow_id,
            action=current.action,
            action_kind=current.action_kind,
            requested_at=current.requested_at,
            status=ApprovalStatus.APPROVED if approve else ApprovalStatus.REJECTED,
            payload=current.payload,
            decided_by=actor,
        )
        store.upsert(decided)
        append_audit(
            store,
            actor=actor,
            action="workflow.approve" if approve else "workflow.reject",
            subject=f"{current.workflow_id}:{current.action}",
            at=now,
            detail={"approval_id": approval_id},
        )
        return decided


def pending_approvals(store: Store, workflow_id: str | None = None) -> list[PendingApproval]:
    rows = [a for a in store.list("approval") if a.status is ApprovalStatus.PENDING]
    if workflow_id is not None:
        rows = [a for a in rows if a.workflow_id == workflow_id]
    return sorted(rows, key=lambda a: a.approval_id)
