"""The human-in-the-loop grade decision state machine.

One decision row per submission. Lifecycles:

    pending -> suggested -> finalized     (accept / adjust / override / human_direct)
    pending -> finalized                  (human_direct, or mcq auto-finalize)

Nothing ever leaves `finalized`. Provenance records who the grade belongs
to: `ai_human` when a human ratified or tuned a suggestion, `human` when
the human graded independently of any suggestion, `ai` only for the policy
gated mcq auto-finalize path. Every finalization appends an audit row.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum

from provost.core.audit import SYSTEM_ACTOR, append_audit
from provost.core.registry import record
from provost.core.store import Store
from provost.errors import AdapterError, ConflictError, NotFoundError, ValidationError
from provost.grading.exams import Question, QuestionKind
from provost.grading.graders import KeyMatchGrader, default_grader

logger = logging.getLogger(__name__)


class DecisionState(str, Enum):
    PENDING = "pending"
    SUGGESTED = "suggested"
    FINALIZED = "finalized"


class DecisionAction(str, Enum):
    ACCEPTED = "accepted"
    ADJUSTED = "adjusted"
    OVERRIDDEN = "overridden"
    HUMAN_DIRECT = "human_direct"
    AUTO_FINALIZED = "auto_finalized"


class Provenance(str, Enum):
    AI = "ai"
    HUMAN = "human"
    AI_HUMAN = "ai_human"


#: action -> provenance; the trichotomy is fixed, not caller-chosen
ACTION_PROVENANCE = {
    DecisionAction.ACCEPTED: Provenance.AI_HUMAN,
    DecisionAction.ADJUSTED: Provenance.AI_HUMAN,
    DecisionAction.OVERRIDDEN: Provenance.HUMAN,
    DecisionAction.HUMAN_DIRECT: Provenance.HUMAN,
    DecisionAction.AUTO_FINALIZED: Provenance.AI,
}


@dataclass(frozen=True)
class SuggestedGrade:
    points: float
    feedback: str
    reasoning: str
    adapter_id: str

    def to_payload(self) -> dict:
        return {
            "points": self.points,
            "feedback": self.feedback,
            "reasoning": self.reasoning,
            "adapter_id": self.adapter_id,
        }

    @classmethod
    def from_payload(cls, p: dict) -> "SuggestedGrade":
        return cls(
            points=float(p["points"]),
            feedback=p["feedback"],
            reasoning=p["reasoning"],
            adapter_id=p["adapter_id"],
        )


@record
@dataclass(frozen=True)
class GradeDecision:
    KIND = "decision"

    exam_id: str
    q_id: str
    student: str
    state: DecisionState = DecisionState.PENDING
    suggestion: SuggestedGrade | None = None
    error_note: str | None = None
    action: DecisionAction | None = None
    final_points: float | None = None
    final_feedback: str | None = None
    provenance: Provenance | None = None
    actor: str | None = None
    decided_at: datetime | None = None

    def storage_key(self) -> str:
        return f"{self.exam_id}~{self.q_id}~{self.student}"

    def to_payload(self) -> dict:
        return {
            "exam_id": self.exam_id,
            "q_id": self.q_id,
            "student": self.student,
            "state": self.state.value,
            "suggestion": self.suggestion.to_payload() if self.suggestion else None,
            "error_note": self.error_note,
            "action": self.action.value if self.action else None,
            "final_points": self.final_points,
            "final_feedback": self.final_feedback,
            "provenance": self.provenance.value if self.provenance else None,
            "actor": self.actor,
            "decided_at": self.decided_at.isoformat() if self.decided_at else None,
        }

    @classmethod
    def from_payload(cls, p: dict) -> "GradeDecision":
        return cls(
            exam_id=p["exam_id"],
            q_id=p["q_id"],
            student=p["student"],
            state=DecisionState(p["state"]),
            suggestion=SuggestedGrade.from_payload(p["suggestion"]) if p.get("suggestion") else None,
            error_note=p.get("error_note"),
            action=DecisionAction(p["action"]) if p.get("action") else None,
            final_points=p.get("final_points"),
            final_feedback=p.get("final_feedback"),
            provenance=Provenance(p["provenance"]) if p.get("provenance") else None,
            actor=p.get("actor"),
            decided_at=datetime.fromisoformat(p["decided_at"]) if p.get("decided_at") else None,
        )

    def field_errors(self):
        errors: list = []
        if self.state is DecisionState.SUGGESTED and self.suggestion is None:
            errors.append(("suggestion", "suggested state requires a stored suggestion"))
        if self.state is DecisionState.FINALIZED:
            for name in ("action", "final_points", "provenance", "actor", "decided_at"):
                if getattr(self, name) is None:
                    errors.append((name, "required once finalized"))
            if self.action is not None and self.provenance is not ACTION_PROVENANCE[self.action]:
                errors.append(("provenance", f"action {self.action.value} fixes provenance"))
        elif self.final_points is not None or self.action is not None:
            errors.append(("state", "final values are only valid on finalized decisions"))
        return errors

    def references(self):
        return [
            ("submission", "submission", self.storage_key()),
            ("exam_id", "exam", self.exam_id),
        ]

    def write_errors(self, lookup):
        if self.state is not DecisionState.FINALIZED or self.final_points is None:
            return []
        exam = lookup("exam", self.exam_id)
        question = exam.question_by_id(self.q_id) if exam is not None else None
        if question is not None and not (0 <= self.final_points <= question.max_points):
            return [
                ("final_points", f"must be within [0, {question.max_points:g}]")
            ]
        return []


def _decision_key(exam_id: str, q_id: str, student: str) -> str:
    return f"{exam_id}~{q_id}~{student}"


def _load_question(store: Store, exam_id: str, q_id: str) -> Question:
    exam = store.require("exam", exam_id)
    question = exam.question_by_id(q_id)
    if question is None:
        raise NotFoundError(f"exam {exam_id} has no question {q_id}")
    return question


def _load_decision(store: Store, exam_id: str, q_id: str, student: str) -> GradeDecision:
    """Current decision row, seeding a pending one for a known submission."""
    key = _decision_key(exam_id, q_id, student)
    decision = store.get("decision", key)
    if decision is not None:
        return decision
    if store.get("submission", key) is None:
        raise NotFoundError(f"no submission {key}")
    return GradeDecision(exam_id=exam_id, q_id=q_id, student=student)


def suggest_grade(
    store: Store,
    exam_id: str,
    q_id: str,
    student: str,
    grader=None,
) -> SuggestedGrade:
    """Run a grader over one submission and record its suggestion. A grader
    crash leaves the row unfinalized with the error on record."""
    question = _load_question(store, exam_id, q_id)
    submission = store.require("submission", _decision_key(exam_id, q_id, student))
    if grader is None:
        grader = default_grader(question)
    with store.locked():
        decision = _load_decision(store, exam_id, q_id, student)
        if decision.state is DecisionState.FINALIZED:
            raise ConflictError(f"submission {decision.storage_key()} is already finalized")
        try:
            points, feedback, reasoning = grader.grade(question, submission.answer_text)
            if not (0 <= points <= question.max_points):
                raise ValueError(f"grader returned {points}, outside [0, {question.max_points:g}]")
        except Exception as exc:
            store.upsert(
                GradeDecision(
                    exam_id=exam_id,
                    q_id=q_id,
                    student=student,
                    state=decision.state,
                    suggestion=decision.suggestion,
                    error_note=f"{type(exc).__name__}: {exc}",
                )
            )
            raise AdapterError(
                f"grader {getattr(grader, 'adapter_id', '?')!r} failed: {exc}",
                adapter_id=getattr(grader, "adapter_id", None),
            ) from exc
        suggestion = SuggestedGrade(
            points=points,
            feedback=feedback,
            reasoning=reasoning,
            adapter_id=grader.adapter_id,
        )
        store.upsert(
            GradeDecision(
                exam_id=exam_id,
                q_id=q_id,
                student=student,
                state=DecisionState.SUGGESTED,
                suggestion=suggestion,
            )
        )
    return suggestion


def decide_grade(
    store: Store,
    exam_id: str,
    q_id: str,
    student: str,
    action: DecisionAction | str,
    actor: str,
    points: float | None = None,
    feedback: str | None = None,
    at: datetime | None = None,
) -> GradeDecision:
    """Finalize one submission by explicit human action."""
    action = DecisionAction(action)
    if action is DecisionAction.AUTO_FINALIZED:
        raise ValidationError("auto finalization goes through auto_finalize_mcq", field="action")
    if not actor:
        raise ValidationError("actor is required", field="actor")
    question = _load_question(store, exam_id, q_id)
    with store.locked():
        decision = _load_decision(store, exam_id, q_id, student)
        if decision.state is DecisionState.FINALIZED:
            raise ConflictError(f"submission {decision.storage_key()} is already finalized")
        needs_suggestion = action in (
            DecisionAction.ACCEPTED,
            DecisionAction.ADJUSTED,
            DecisionAction.OVERRIDDEN,
        )
        if needs_suggestion and decision.state is not DecisionState.SUGGESTED:
            raise ValidationError(
                f"{action.value} requires a suggestion on record", field="action"
            )
        if action is DecisionAction.ACCEPTED:
            final_points = decision.suggestion.points
            final_feedback = decision.suggestion.feedback if feedback is None else feedback
        else:
            if points is None:
                raise ValidationError(f"{action.value} requires points", field="points")
            if not (0 <= points <= question.max_points):
                raise ValidationError(
                    f"points must be within [0, {question.max_points:g}]", field="points"
                )
            final_points = points
            final_feedback = feedback if feedback is not None else ""
        finalized = GradeDecision(
            exam_id=exam_id,
            q_id=q_id,
            student=student,
            state=DecisionState.FINALIZED,
            suggestion=decision.suggestion,
            action=action,
            final_points=final_points,
            final_feedback=final_feedback,
            provenance=ACTION_PROVENANCE[action],
            actor=actor,
            decided_at=at if at is not None else datetime.now(timezone.utc),
        )
        store.upsert(finalized)
        append_audit(
            store,
            actor=actor,
            action="grade.decide",
            subject=f"decision:{finalized.storage_key()}",
            detail={
                "action": action.value,
                "final_points": final_points,
                "provenance": finalized.provenance.value,
            },
            at=finalized.decided_at,
        )
    logger.info(
        "decision %s: %s by %s (%s)", finalized.storage_key(), action.value, actor,
        finalized.provenance.value,
    )
    return finalized


def auto_finalize_mcq(
    store: Store,
    exam_id: str,
    q_id: str,
    student: str,
    autonomy_level: int,
    at: datetime | None = None,
) -> GradeDecision:
    """Policy-gated machine finalization: mcq only, autonomy level 3 or
    above, straight from pending."""
    question = _load_question(store, exam_id, q_id)
    if question.kind is not QuestionKind.MCQ:
        raise ValidationError(
            f"auto finalization is limited to mcq questions, not {question.kind.value}",
            field="q_id",
        )
    if autonomy_level < 3:
        raise ValidationError(
            f"auto finalization requires autonomy level >= 3, running at {autonomy_level}",
            field="autonomy_level",
        )
    submission = store.require("submission", _decision_key(exam_id, q_id, student))
    grader = KeyMatchGrader()
    with store.locked():
        decision = _load_decision(store, exam_id, q_id, student)
        if decision.state is DecisionState.FINALIZED:
            raise ConflictError(f"submission {decision.storage_key()} is already finalized")
        if decision.state is not DecisionState.PENDING:
            raise ConflictError(
                f"submission {decision.storage_key()} already has a suggestion awaiting review"
            )
        points, feedback, reasoning = grader.grade(question, submission.answer_text)
        finalized = GradeDecision(
            exam_id=exam_id,
            q_id=q_id,
            student=student,
            state=DecisionState.FINALIZED,
            suggestion=SuggestedGrade(points, feedback, reasoning, grader.adapter_id),
            action=DecisionAction.AUTO_FINALIZED,
            final_points=points,
            final_feedback=feedback,
            provenance=Provenance.AI,
            actor=SYSTEM_ACTOR,
            decided_at=at if at is not None else datetime.now(timezone.utc),
        )
        store.upsert(finalized)
        append_audit(
            store,
            actor=SYSTEM_ACTOR,
            action="grade.decide",
            subject=f"decision:{finalized.storage_key()}",
            detail={
                "action": DecisionAction.AUTO_FINALIZED.value,
                "final_points": points,
                "provenance": Provenance.AI.value,
                "autonomy_level": autonomy_level,
            },
            at=finalized.decided_at,
        )
    return finalized


def audit_trail(store: Store, exam_id: str) -> list[dict]:
    """Provenance rows for every finalized submission of one exam, ordered
    by decision time."""
    store.require("exam", exam_id)
    rows = [
        d for d in store.list("decision")
        if d.exam_id == exam_id and d.state is DecisionState.FINALIZED
    ]
    rows.sort(key=lambda d: (d.decided_at.isoformat(), d.storage_key()))
    return [
        {
            "submission": d.storage_key(),
            "student": d.student,
            "q_id": d.q_id,
            "action": d.action.value,
            "provenance": d.provenance.value,
            "final_points": d.final_points,
            "actor": d.actor,
            "at": d.decided_at.isoformat(),
        }
        for d in rows
    ]


@dataclass(frozen=True)
class GradebookRow:
    student: str
    exam_id: str
    q_id: str
    offering: str
    kind: QuestionKind
    final_points: float
    max_points: float
    provenance: Provenance
    clo_links: tuple[str, ...]


def gradebook_rows(
    store: Store,
    offerings: set[str] | None = None,
    exam_id: str | None = None,
) -> list[GradebookRow]:
    """Finalized decisions joined with their questions; the substrate for
    outcome analytics and the CSV export."""
    rows: list[GradebookRow] = []
    for decision in store.list("decision"):
        if decision.state is not DecisionState.FINALIZED:
            continue
        if exam_id is not None and decision.exam_id != exam_id:
            continue
        exam = store.require("exam", decision.exam_id)
        if offerings is not None and exam.offering not in offerings:
            continue
        question = exam.question_by_id(decision.q_id)
        rows.append(
            GradebookRow(
                student=decision.student,
                exam_id=decision.exam_id,
                q_id=decision.q_id,
                offering=exam.offering,
                kind=question.kind,
                final_points=decision.final_points,
                max_points=question.max_points,
                provenance=decision.provenance,
                clo_links=question.clo_links,
            )
        )
    rows.sort(key=lambda r: (r.student, r.exam_id, r.q_id))
    return rows


GRADEBOOK_HEADER = [
    "student_id", "exam_id", "q_id", "final_points", "max_points", "provenance", "clo_links",
]


def export_gradebook(
    store: Store,
    offerings: set[str] | None = None,
    exam_id: str | None = None,
) -> str:
    """Dual-use CSV of finalized grades (clo_links semicolon-joined)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(GRADEBOOK_HEADER)
    for row in gradebook_rows(store, offerings=offerings, exam_id=exam_id):
        writer.writerow(
            [
                row.student,
                row.exam_id,
                row.q_id,
                f"{row.final_points:g}",
                f"{row.max_points:g}",
                row.provenance.value,
                ";".join(row.clo_links),
            ]
        )
    return buffer.getvalue()
