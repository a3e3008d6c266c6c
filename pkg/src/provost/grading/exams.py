"""Exams and their questions, each tied to CLOs of a confirmed specification.

CLO membership is enforced by create_exam, the single construction path:
a blueprint row naming a CLO outside the offering's confirmed specification
is an integrity failure, because grade analytics would silently drop those
points otherwise.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum

from provost.core.registry import record
from provost.core.store import Store
from provost.errors import IntegrityError, ValidationError
from provost.ingest.model import BloomLevel, SpecStatus

RUBRIC_TOLERANCE = 1e-9

#: equal-split criteria used by the stub generator for non-mcq questions
STUB_CRITERIA = ("correctness", "completeness", "clarity", "rigor")


class QuestionKind(str, Enum):
    MCQ = "mcq"
    ESSAY = "essay"
    CODE = "code"
    HANDWRITTEN = "handwritten"


@dataclass(frozen=True)
class Question:
    q_id: str
    kind: QuestionKind
    max_points: float
    clo_links: tuple[str, ...]
    bloom_level: BloomLevel | None = None
    rubric: tuple[tuple[str, float], ...] = ()
    statement: str = ""
    answer_key: str | None = None

    def to_payload(self) -> dict:
        return {
            "q_id": self.q_id,
            "kind": self.kind.value,
            "max_points": self.max_points,
            "clo_links": list(self.clo_links),
            "bloom_level": self.bloom_level.value if self.bloom_level else None,
            "rubric": [{"criterion": c, "points": p} for c, p in self.rubric],
            "statement": self.statement,
            "answer_key": self.answer_key,
        }

    @classmethod
    def from_payload(cls, p: dict) -> "Question":
        bloom = p.get("bloom_level")
        return cls(
            q_id=p["q_id"],
            kind=QuestionKind(p["kind"]),
            max_points=float(p["max_points"]),
            clo_links=tuple(p["clo_links"]),
            bloom_level=BloomLevel(bloom) if bloom else None,
            rubric=tuple((r["criterion"], float(r["points"])) for r in p["rubric"]),
            statement=p.get("statement", ""),
            answer_key=p.get("answer_key"),
        )

    def field_errors(self) -> list:
        errors: list = []
        if not self.q_id:
            errors.append(("q_id", "must be non-empty"))
        if self.max_points <= 0:
            errors.append(("max_points", "must be positive"))
        if not self.clo_links:
            errors.append(("clo_links", "must link at least one CLO"))
        if self.rubric:
            total = sum(points for _, points in self.rubric)
            if abs(total - self.max_points) > RUBRIC_TOLERANCE:
                errors.append(
                    ("rubric", f"rubric points sum to {total:g}, expected {self.max_points:g}")
                )
        return errors


@record
@dataclass(frozen=True)
class Exam:
    KIND = "exam"

    exam_id: str
    offering: str
    questions: tuple[Question, ...]

    def storage_key(self) -> str:
        return self.exam_id

    def to_payload(self) -> dict:
        return {
            "exam_id": self.exam_id,
            "offering": self.offering,
            "questions": [q.to_payload() for q in self.questions],
        }

    @classmethod
    def from_payload(cls, p: dict) -> "Exam":
        return cls(
            exam_id=p["exam_id"],
            offering=p["offering"],
            questions=tuple(Question.from_payload(q) for q in p["questions"]),
        )

    def field_errors(self):
        errors: list = []
        if not self.exam_id:
            errors.append(("exam_id", "must be non-empty"))
        if not self.questions:
            errors.append(("questions", "an exam requires at least one question"))
        seen: set[str] = set()
        for question in self.questions:
            if question.q_id in seen:
                errors.append(("questions", f"duplicate question id {question.q_id}"))
            seen.add(question.q_id)
            errors.extend(question.field_errors())
        return errors

    def references(self):
        return [("offering", "offering", self.offering)]

    def question_by_id(self, q_id: str) -> Question | None:
        for question in self.questions:
            if question.q_id == q_id:
                return question
        return None


class StubExamGenerator:
    """Deterministic generator: statements come from CLO statements, mcq
    answer keys from a stable hash, rubrics from an equal four-way split."""

    adapter_id = "stub"

    def generate(self, exam_id: str, offering: str, blueprint, spec) -> Exam:
        questions = []
        for index, (kind, clo_links, bloom_level, max_points) in enumerate(blueprint, start=1):
            q_id = f"q{index}"
            lead = spec.clo_by_id(clo_links[0])
            statement = f"[{kind.value}] Demonstrate: {lead.statement}"
            answer_key = None
            rubric: tuple[tuple[str, float], ...] = ()
            if kind is QuestionKind.MCQ:
                seed = hashlib.sha256(f"{exam_id}:{q_id}".encode()).hexdigest()
                answer_key = "abcd"[int(seed, 16) % 4]
                statement += " " + " ".join(f"{o})" for o in "abcd")
            else:
                share = max_points / len(STUB_CRITERIA)
                rubric = tuple((criterion, share) for criterion in STUB_CRITERIA)
            questions.append(
                Question(
                    q_id=q_id,
                    kind=kind,
                    max_points=max_points,
                    clo_links=tuple(clo_links),
                    bloom_level=bloom_level,
                    rubric=rubric,
                    statement=statement,
                    answer_key=answer_key,
                )
            )
        return Exam(exam_id=exam_id, offering=offering, questions=tuple(questions))


def create_exam(
    store: Store,
    offering: str,
    blueprint: list[tuple[QuestionKind, tuple[str, ...], BloomLevel | None, float]],
    generator=None,
    exam_id: str | None = None,
) -> Exam:
    """Generate and persist an exam whose questions satisfy the blueprint
    row for row."""
    if not blueprint:
        raise ValidationError("blueprint is empty", field="blueprint")
    offering_rec = store.require("offering", offering)
    spec = store.get("course_spec", offering_rec.course)
    if spec is None or spec.status is not SpecStatus.CONFIRMED:
        raise IntegrityError(
            f"offering {offering} has no confirmed specification for course {offering_rec.course}",
            field="offering",
        )
    known = {clo.clo_id for clo in spec.clos}
    for kind, clo_links, _, _ in blueprint:
        for clo_id in clo_links:
            if clo_id not in known:
                raise IntegrityError(
                    f"{clo_id} not in specification of course {offering_rec.course}",
                    field="clo_links",
                )
    if exam_id is None:
        exam_id = f"{offering}-exam{len([e for e in store.list('exam') if e.offering == offering]) + 1}"
    if generator is None:
        generator = StubExamGenerator()
    exam = generator.generate(exam_id, offering, blueprint, spec)
    store.upsert(exam)
    return exam
