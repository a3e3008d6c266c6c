"""Submissions and the in-repo deterministic graders.

Both graders are honest mocks: the key matcher scores mcq answers against
the stored key, the keyword grader awards each rubric criterion whose name
appears in the answer text. Model-backed graders implement the same
adapter surface; they are a deployment concern, not a test subject.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

from provost.core.registry import record
from provost.grading.exams import Question, QuestionKind


@record
@dataclass(frozen=True)
class Submission:
    KIND = "submission"

    exam_id: str
    q_id: str
    student: str
    answer_text: str

    def storage_key(self) -> str:
        return f"{self.exam_id}~{self.q_id}~{self.student}"

    def to_payload(self) -> dict:
        return {
            "exam_id": self.exam_id,
            "q_id": self.q_id,
            "student": self.student,
            "answer_text": self.answer_text,
        }

    @classmethod
    def from_payload(cls, p: dict) -> "Submission":
        return cls(
            exam_id=p["exam_id"],
            q_id=p["q_id"],
            student=p["student"],
            answer_text=p["answer_text"],
        )

    def references(self):
        return [("exam_id", "exam", self.exam_id), ("student", "student", self.student)]

    def write_errors(self, lookup):
        exam = lookup("exam", self.exam_id)
        if exam is not None and exam.question_by_id(self.q_id) is None:
            return [("q_id", f"exam {self.exam_id} has no question {self.q_id}")]
        return []


class GraderAdapter(Protocol):
    adapter_id: str

    def grade(self, question: Question, answer_text: str) -> tuple[float, str, str]:
        """Returns (points, feedback, reasoning)."""
        ...


class KeyMatchGrader:
    """Exact-match mcq grader: full points iff the trimmed, lowercased
    answer equals the stored key."""

    adapter_id = "key_match"

    def grade(self, question: Question, answer_text: str) -> tuple[float, str, str]:
        answer = answer_text.strip().lower()
        correct = question.answer_key is not None and answer == question.answer_key
        points = question.max_points if correct else 0.0
        feedback = "Correct." if correct else f"Incorrect; the key is {question.answer_key!r}."
        reasoning = (
            f"Compared normalized answer {answer!r} against key {question.answer_key!r}: "
            f"{'match' if correct else 'no match'}."
        )
        return points, feedback, reasoning


class KeywordRubricGrader:
    """Rubric grader: a criterion is satisfied iff its name appears in the
    answer text, case-insensitively. Transparent enough to test against by
    hand, shaped like the graders it stands in for."""

    adapter_id = "keyword_rubric"

    def grade(self, question: Question, answer_text: str) -> tuple[float, str, str]:
        text = answer_text.lower()
        points = 0.0
        hits: list[str] = []
        misses: list[str] = []
        for criterion, criterion_points in question.rubric:
            if criterion.lower() in text:
                points += criterion_points
                hits.append(criterion)
            else:
                misses.append(criterion)
        feedback = (
            "All rubric criteria addressed."
            if not misses
            else "Not addressed: " + ", ".join(misses) + "."
        )
        reasoning = (
            f"Rubric scan over {len(question.rubric)} criteria: "
            f"hit [{', '.join(hits) or '-'}], missed [{', '.join(misses) or '-'}]."
        )
        return points, feedback, reasoning


def default_grader(question: Question) -> GraderAdapter:
    if question.kind is QuestionKind.MCQ:
        return KeyMatchGrader()
    return KeywordRubricGrader()
