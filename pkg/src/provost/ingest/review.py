"""Human review of extracted drafts.

Extraction never publishes anything on its own: a draft sits in the store
until a named reviewer confirms it, and only then does the course gain a
confirmed specification. Every confirmation leaves an audit row carrying
the reviewer and the draft's content hash.
"""

from __future__ import annotations

import logging
from datetime import datetime

from provost.core.audit import append_audit
from provost.core.store import Store
from provost.errors import IntegrityError, NotFoundError, ValidationError
from provost.ingest.model import (
    WEIGHT_TOLERANCE,
    CourseSpecification,
    DraftSpecification,
    Finding,
    SpecStatus,
)

logger = logging.getLogger(__name__)


def validate_draft(draft: DraftSpecification) -> list[Finding]:
    """Deterministic review findings. `error` findings block confirmation;
    `warn` findings inform the reviewer and nothing else."""
    findings: list[Finding] = []
    if not draft.course:
        findings.append(Finding("error", "course", "no course key extracted"))
    if not draft.clos:
        findings.append(Finding("error", "clos", "at least one CLO is required"))
    seen: set[str] = set()
    for clo in draft.clos:
        if not clo.statement.strip():
            findings.append(Finding("error", "clos", f"CLO {clo.clo_id} has an empty statement"))
        if clo.clo_id in seen:
            findings.append(Finding("error", "clos", f"duplicate CLO id {clo.clo_id}"))
        seen.add(clo.clo_id)
        if clo.bloom_level is None:
            findings.append(Finding("warn", "clos", f"CLO {clo.clo_id} has no bloom level"))
    if draft.assessment_methods:
        total = sum(weight for _, weight in draft.assessment_methods)
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            findings.append(
                Finding("error", "assessment_methods", f"weights sum to {total:g}, expected 1.0")
            )
    if not draft.topics:
        findings.append(Finding("warn", "topics", "no topics extracted"))
    if not draft.textbooks:
        findings.append(Finding("warn", "textbooks", "no textbooks extracted"))
    return findings


def store_draft(store: Store, draft: DraftSpecification) -> str:
    """Persist a draft for later confirmation; returns its content-hash id.
    Re-extracting the same document is a no-op apart from the revision."""
    store.upsert(draft)
    return draft.draft_id


def load_draft(store: Store, draft_id: str) -> DraftSpecification:
    draft = store.get("draft_spec", draft_id)
    if draft is None:
        raise NotFoundError(f"no draft with id {draft_id}")
    return draft


def confirm_draft(
    store: Store,
    draft: DraftSpecification,
    reviewer: str,
    at: datetime | None = None,
) -> CourseSpecification:
    """Turn a clean draft into the confirmed specification of its course."""
    if store.get("employee", reviewer) is None:
        raise IntegrityError(f"reviewer references missing employee {reviewer}", field="reviewer")
    errors = [f for f in validate_draft(draft) if f.severity == "error"]
    if errors:
        listing = "; ".join(f"{f.field}: {f.message}" for f in errors)
        raise ValidationError(f"draft has blocking findings: {listing}", field=errors[0].field)
    spec = CourseSpecification(
        course=draft.course,
        clos=draft.clos,
        topics=draft.topics,
        assessment_methods=draft.assessment_methods,
        textbooks=draft.textbooks,
        status=SpecStatus.CONFIRMED,
    )
    with store.locked():
        ref = store.upsert(spec)
        append_audit(
            store,
            actor=reviewer,
            action="ingest.confirm",
            subject=str(ref),
            detail={"draft_id": draft.draft_id, "revision": store.revision(ref.kind, ref.key)},
            at=at,
        )
    logger.info("spec for course %s confirmed by %s (draft %s)", spec.course, reviewer, draft.draft_id)
    return spec
