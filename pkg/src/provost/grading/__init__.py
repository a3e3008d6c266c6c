"""Exam modeling, grade suggestion, human decisions, and scale conversion."""

from provost.grading.decisions import (
    DecisionAction,
    DecisionState,
    GradeDecision,
    Provenance,
    SuggestedGrade,
    audit_trail,
    auto_finalize_mcq,
    decide_grade,
    export_gradebook,
    gradebook_rows,
    suggest_grade,
)
from provost.grading.exams import Exam, Question, QuestionKind, StubExamGenerator, create_exam
from provost.grading.graders import KeyMatchGrader, KeywordRubricGrader, Submission
from provost.grading.scales import DEFAULT_MAPPING, DualGrade, GradeMapping, convert_grade

__all__ = [
    "DEFAULT_MAPPING",
    "DecisionAction",
    "DecisionState",
    "DualGrade",
    "Exam",
    "GradeDecision",
    "GradeMapping",
    "KeyMatchGrader",
    "KeywordRubricGrader",
    "Provenance",
    "Question",
    "QuestionKind",
    "StubExamGenerator",
    "Submission",
    "SuggestedGrade",
    "audit_trail",
    "auto_finalize_mcq",
    "convert_grade",
    "create_exam",
    "decide_grade",
    "export_gradebook",
    "gradebook_rows",
    "suggest_grade",
]
