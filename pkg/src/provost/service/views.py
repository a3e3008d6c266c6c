"""Read views and request parsers shared by the HTTP endpoints and the CLI.

The view functions return plain JSON-ready data. Both faces serialize
these with the canonical encoder, which is what makes CLI --json output
and endpoint bodies byte-identical for the same store. The parse helpers
turn wire-format values (ISO dates, blueprint rows) into domain values
with field-precise validation errors.
"""

from __future__ import annotations

from datetime import date

from provost.core.audit import audit_trail
from provost.core.registry import RECORD_TYPES
from provost.core.store import Store
from provost.errors import NotFoundError, ValidationError
from provost.grading.decisions import DecisionState
from provost.grading.exams import QuestionKind
from provost.ingest.model import BloomLevel
from provost.outcomes.achievement import clo_achievement, plo_achievement
from provost.outcomes.compliance import Ruleset, check_program_compliance
from provost.outcomes.matrix import build_matrix
from provost.reports.model import InsightReport, ReportStatus, ReportType
from provost.workflows.engine import RunResult


def entity_kind(kind: str) -> type:
    cls = RECORD_TYPES.get(kind)
    if cls is None:
        raise NotFoundError(f"unknown record kind {kind!r}")
    return cls


def entities_view(store: Store, kind: str) -> list[dict]:
    entity_kind(kind)
    return [rec.to_payload() for rec in store.list(kind)]


def clo_view(
    store: Store,
    offering: str,
    clo_id: str,
    threshold: float | None = None,
    target_share: float | None = None,
) -> dict:
    kwargs = {}
    if threshold is not None:
        kwargs["threshold"] = threshold
    if target_share is not None:
        kwargs["target_share"] = target_share
    return clo_achievement(store, offering, clo_id, **kwargs).to_payload()


def plo_view(store: Store, program: str, term: str) -> dict:
    stats = plo_achievement(store, program, term)
    return {
        "program": program,
        "term": term,
        "plos": [stat.to_payload() for stat in stats],
    }


def matrix_view(store: Store, program: str, term: str) -> dict:
    return build_matrix(store, program, term).to_payload()


def comply_view(store: Store, program: str, ruleset: Ruleset) -> dict:
    findings = check_program_compliance(store, program, ruleset)
    return {
        "program": program,
        "clean": not findings,
        "findings": [finding.to_payload() for finding in findings],
    }


def queue_view(store: Store, offering: str | None = None) -> list[dict]:
    """Suggestions awaiting review, enriched with everything the reviewer
    sees: the question, the answer, and the machine's reasoning."""
    rows = []
    for decision in store.list("decision"):
        if decision.state is not DecisionState.SUGGESTED:
            continue
        exam = store.require("exam", decision.exam_id)
        if offering is not None and exam.offering != offering:
            continue
        question = exam.question_by_id(decision.q_id)
        submission = store.require("submission", decision.storage_key())
        rows.append(
            {
                "exam_id": decision.exam_id,
                "q_id": decision.q_id,
                "student": decision.student,
                "offering": exam.offering,
                "question_kind": question.kind.value,
                "max_points": question.max_points,
                "answer_text": submission.answer_text,
                "suggestion": decision.suggestion.to_payload(),
            }
        )
    return rows


def audit_view(
    store: Store,
    subject: str | None = None,
    action: str | None = None,
    actor: str | None = None,
) -> list[dict]:
    return [row.to_payload() for row in audit_trail(store, subject=subject, action=action, actor=actor)]


def _parse_report_type(raw: str) -> ReportType:
    try:
        return ReportType(raw)
    except ValueError:
        raise ValidationError(f"unknown report type {raw!r}", field="type") from None


def _parse_report_status(raw: str) -> ReportStatus:
    try:
        return ReportStatus(raw)
    except ValueError:
        raise ValidationError(f"unknown report status {raw!r}", field="status") from None


def reports_view(
    store: Store,
    report_type: str | None = None,
    status: str | None = None,
    subject: str | None = None,
) -> list[dict]:
    """Stored reports, newest first; drafts and pending ones included so
    the approval queue is visible."""
    reports: list[InsightReport] = store.list("report")
    if report_type is not None:
        wanted_type = _parse_report_type(report_type)
        reports = [r for r in reports if r.report_type is wanted_type]
    if status is not None:
        wanted_status = _parse_report_status(status)
        reports = [r for r in reports if r.status is wanted_status]
    if subject is not None:
        reports = [r for r in reports if r.subject == subject]
    reports.sort(key=lambda r: (-r.generated_at, r.report_id))
    return [r.to_payload() for r in reports]


def run_view(result: RunResult) -> dict:
    return {
        "run_id": result.run_id,
        "workflow_id": result.workflow_id,
        "as_of": result.as_of.isoformat(),
        "terminal": result.transcript.terminal.value,
        "report_ids": [r.report_id for r in result.reports],
        "reports": [r.to_payload() for r in result.reports],
        "pending": [p.to_payload() for p in result.pending],
        "transcript": result.transcript.to_payload(),
    }


def parse_iso_date(raw: str, field: str) -> date:
    try:
        return date.fromisoformat(raw)
    except ValueError:
        raise ValidationError(f"{field}: expected YYYY-MM-DD, got {raw!r}", field=field) from None


def parse_blueprint(raw: list) -> list[tuple]:
    """Turn JSON blueprint rows into the tuples exam creation expects."""
    rows: list[tuple] = []
    for i, row in enumerate(raw):
        where = f"blueprint[{i}]"
        if not isinstance(row, dict):
            raise ValidationError(f"{where} must be an object", field="blueprint")
        try:
            kind = QuestionKind(row.get("kind"))
        except ValueError:
            raise ValidationError(
                f"{where}.kind: unknown question kind {row.get('kind')!r}", field="blueprint"
            ) from None
        links = row.get("clo_links", [])
        if not isinstance(links, list) or not all(isinstance(c, str) for c in links):
            raise ValidationError(f"{where}.clo_links must be a list of CLO ids", field="blueprint")
        bloom = None
        if row.get("bloom_level") is not None:
            try:
                bloom = BloomLevel(row["bloom_level"])
            except ValueError:
                raise ValidationError(
                    f"{where}.bloom_level: unknown level {row['bloom_level']!r}", field="blueprint"
                ) from None
        max_points = row.get("max_points")
        if not isinstance(max_points, (int, float)) or isinstance(max_points, bool):
            raise ValidationError(f"{where}.max_points must be a number", field="blueprint")
        rows.append((kind, tuple(links), bloom, float(max_points)))
    return rows
