"""Grading: scales, graders, and the review decision machine."""

from datetime import date

import pytest

from provost.core.entities import (
    College, Course, CourseOffering, Department, Employee, Enrollment,
    Institution, Student, Term,
)
from provost.errors import (
    AdapterError, ConfigurationError, ConflictError, IntegrityError, ValidationError,
)
from provost.grading.decisions import (
    DecisionAction,
    DecisionState,
    Provenance,
    auto_finalize_mcq,
    audit_trail,
    decide_grade,
    export_gradebook,
    gradebook_rows,
    suggest_grade,
)
from provost.grading.exams import QuestionKind, create_exam
from provost.grading.graders import (
    KeyMatchGrader, KeywordRubricGrader, Submission, default_grader,
)
from provost.grading.scales import (
    DEFAULT_MAPPING, GradeBand, GradeMapping, convert_grade,
)
from provost.ingest.extractor import extract_specification
from provost.ingest.review import confirm_draft, store_draft

# ------------------------------------------------------------------ scales


def test_default_mapping_pins():
    for percent, letter, numeric in ((72.8, "C", 14.56), (100.0, "A+", 20.0), (0.0, "F", 0.0)):
        dual = convert_grade(percent)
        assert (dual.letter, dual.numeric20) == (letter, numeric)


def test_band_edges_are_lower_inclusive():
    assert convert_grade(59.999).letter == "F"
    assert convert_grade(60.0).letter == "D"
    assert convert_grade(94.999).letter == "A"
    assert convert_grade(95.0).letter == "A+"


def test_convert_rejects_out_of_range():
    for percent in (-0.1, 100.1):
        with pytest.raises(ValidationError):
            convert_grade(percent)


def test_mapping_config_validation():
    with pytest.raises(ConfigurationError, match="start"):
        GradeMapping([GradeBand("F", 10, 100)])
    with pytest.raises(ConfigurationError, match="end"):
        GradeMapping([GradeBand("F", 0, 90)])
    with pytest.raises(ConfigurationError, match="gap"):
        GradeMapping([GradeBand("F", 0, 50), GradeBand("P", 60, 100)])
    with pytest.raises(ConfigurationError, match="overlap"):
        GradeMapping([GradeBand("F", 0, 60), GradeBand("P", 50, 100)])
    with pytest.raises(ConfigurationError, match="duplicate"):
        GradeMapping([GradeBand("X", 0, 50), GradeBand("X", 50, 100)])
    with pytest.raises(ConfigurationError, match="empty or inverted"):
        GradeMapping([GradeBand("F", 0, 0), GradeBand("P", 0, 100)])


def test_mapping_payload_round_trip():
    again = GradeMapping.from_payload(DEFAULT_MAPPING.to_payload())
    assert again.to_payload() == DEFAULT_MAPPING.to_payload()


# ----------------------------------------------------------------- graders


def seed_exam(store):
    """Confirmed spec plus a two-question exam (q1 mcq, q2 essay)."""
    store.upsert(Institution("i1", "Test U"))
    store.upsert(College("k1", "i1", "Engineering"))
    store.upsert(Department("d1", "k1", "Computing"))
    store.upsert(Course("c1", "d1", "Intro"))
    store.upsert(Term("t1", "2025 Fall", date(2025, 9, 8), date(2025, 12, 26)))
    store.upsert(Employee("e1", "Grace"))
    store.upsert(CourseOffering("c1-t1", "c1", "t1", "e1", sessions=()))
    store.upsert(Student("s1", "Ada"))
    store.upsert(Enrollment("s1", "c1-t1"))
    draft = extract_specification(
        "COURSE: c1\n"
        "CLO c1.1 [remember]: State the definitions.\n"
        "TOPIC: Definitions\n"
        "ASSESS: Final exam, 1.0\n"
        "BOOK: Book\n"
    )
    store_draft(store, draft)
    confirm_draft(store, draft, reviewer="e1")
    exam = create_exam(
        store, "c1-t1",
        [
            (QuestionKind.MCQ, ("c1.1",), None, 5.0),
            (QuestionKind.ESSAY, ("c1.1",), None, 10.0),
        ],
        exam_id="x1",
    )
    return exam


def submit(store, exam, q_id, text, student="s1"):
    store.upsert(Submission(exam.exam_id, q_id, student, text))


def test_key_match_grader(store):
    exam = seed_exam(store)
    q1 = exam.question_by_id("q1")
    points, feedback, reasoning = KeyMatchGrader().grade(q1, f"  {q1.answer_key.upper()} ")
    assert points == q1.max_points and feedback == "Correct."
    points, feedback, _ = KeyMatchGrader().grade(q1, "zebra")
    assert points == 0.0 and "Incorrect" in feedback
    assert q1.answer_key in feedback


def test_keyword_rubric_partial_credit(store):
    exam = seed_exam(store)
    q2 = exam.question_by_id("q2")
    named = [criterion for criterion, _ in q2.rubric[:2]]
    points, feedback, reasoning = KeywordRubricGrader().grade(q2, " and ".join(named))
    assert points == pytest.approx(q2.max_points / 2)
    assert all(c in reasoning for c, _ in q2.rubric)
    missed = [c for c, _ in q2.rubric[2:]]
    assert all(c in feedback for c in missed)


def test_default_grader_dispatch(store):
    exam = seed_exam(store)
    assert isinstance(default_grader(exam.question_by_id("q1")), KeyMatchGrader)
    assert isinstance(default_grader(exam.question_by_id("q2")), KeywordRubricGrader)


def test_create_exam_validates_clo_links(store):
    seed_exam(store)
    with pytest.raises(IntegrityError, match="not in specification"):
        create_exam(store, "c1-t1", [(QuestionKind.MCQ, ("c9.9",), None, 5.0)])


# ---------------------------------------------------------- decision machine


def test_suggest_then_accept(store):
    exam = seed_exam(store)
    submit(store, exam, "q1", "a")
    suggestion = suggest_grade(store, exam.exam_id, "q1", "s1")
    row = store.require("decision", f"{exam.exam_id}~q1~s1")
    assert row.state is DecisionState.SUGGESTED

    decision = decide_grade(store, exam.exam_id, "q1", "s1", "accepted", actor="e1")
    assert decision.state is DecisionState.FINALIZED
    assert decision.final_points == suggestion.points
    assert decision.final_feedback == suggestion.feedback
    assert decision.provenance is Provenance.AI_HUMAN


def test_adjust_and_override_set_points_and_provenance(store):
    exam = seed_exam(store)
    submit(store, exam, "q2", "correctness only")
    suggest_grade(store, exam.exam_id, "q2", "s1")
    adjusted = decide_grade(
        store, exam.exam_id, "q2", "s1", "adjusted",
        actor="e1", points=6.0, feedback="Partial credit.",
    )
    assert adjusted.final_points == 6.0
    assert adjusted.provenance is Provenance.AI_HUMAN

    store2 = type(store)()
    exam2 = seed_exam(store2)
    submit(store2, exam2, "q2", "nothing relevant")
    suggest_grade(store2, exam2.exam_id, "q2", "s1")
    overridden = decide_grade(
        store2, exam2.exam_id, "q2", "s1", "overridden", actor="e1", points=9.0,
    )
    assert overridden.provenance is Provenance.HUMAN


def test_human_direct_needs_no_suggestion(store):
    exam = seed_exam(store)
    submit(store, exam, "q2", "handwritten, graded on paper")
    decision = decide_grade(
        store, exam.exam_id, "q2", "s1", "human_direct", actor="e1", points=7.5,
    )
    assert decision.provenance is Provenance.HUMAN
    assert decision.suggestion is None


def test_accept_requires_suggestion_on_record(store):
    exam = seed_exam(store)
    submit(store, exam, "q1", "a")
    with pytest.raises(ValidationError, match="requires a suggestion"):
        decide_grade(store, exam.exam_id, "q1", "s1", "accepted", actor="e1")


def test_points_bounds_enforced(store):
    exam = seed_exam(store)
    submit(store, exam, "q2", "text")
    suggest_grade(store, exam.exam_id, "q2", "s1")
    for bad in (-1.0, 10.5):
        with pytest.raises(ValidationError, match="points"):
            decide_grade(store, exam.exam_id, "q2", "s1", "adjusted", actor="e1", points=bad)
    with pytest.raises(ValidationError, match="requires points"):
        decide_grade(store, exam.exam_id, "q2", "s1", "adjusted", actor="e1")


def test_finalized_rows_are_immutable(store):
    exam = seed_exam(store)
    submit(store, exam, "q1", "a")
    suggest_grade(store, exam.exam_id, "q1", "s1")
    decide_grade(store, exam.exam_id, "q1", "s1", "accepted", actor="e1")
    with pytest.raises(ConflictError):
        decide_grade(store, exam.exam_id, "q1", "s1", "overridden", actor="e1", points=0.0)
    with pytest.raises(ConflictError):
        suggest_grade(store, exam.exam_id, "q1", "s1")
    with pytest.raises(ConflictError):
        auto_finalize_mcq(store, exam.exam_id, "q1", "s1", 3)


def test_grader_crash_leaves_row_pending_with_note(store):
    exam = seed_exam(store)
    submit(store, exam, "q2", "text")

    class Broken:
        adapter_id = "broken"

        def grade(self, question, answer_text):
            raise RuntimeError("boom")

    with pytest.raises(AdapterError):
        suggest_grade(store, exam.exam_id, "q2", "s1", grader=Broken())
    row = store.require("decision", f"{exam.exam_id}~q2~s1")
    assert row.state is DecisionState.PENDING
    assert "boom" in row.error_note


def test_auto_finalize_gates(store):
    exam = seed_exam(store)
    submit(store, exam, "q1", "a")
    submit(store, exam, "q2", "essay text")
    with pytest.raises(ValidationError, match="autonomy level"):
        auto_finalize_mcq(store, exam.exam_id, "q1", "s1", 2)
    with pytest.raises(ValidationError, match="mcq"):
        auto_finalize_mcq(store, exam.exam_id, "q2", "s1", 3)

    decision = auto_finalize_mcq(store, exam.exam_id, "q1", "s1", 3)
    assert decision.provenance is Provenance.AI
    assert decision.action is DecisionAction.AUTO_FINALIZED


def test_auto_finalize_refuses_suggested_rows(store):
    exam = seed_exam(store)
    submit(store, exam, "q1", "a")
    suggest_grade(store, exam.exam_id, "q1", "s1")
    with pytest.raises(ConflictError, match="awaiting review"):
        auto_finalize_mcq(store, exam.exam_id, "q1", "s1", 3)


def test_decide_audits_action_and_provenance(store):
    exam = seed_exam(store)
    submit(store, exam, "q1", "a")
    suggest_grade(store, exam.exam_id, "q1", "s1")
    decide_grade(store, exam.exam_id, "q1", "s1", "accepted", actor="e1")

    trail = audit_trail(store, exam.exam_id)
    assert len(trail) == 1
    assert trail[0]["action"] == "accepted"
    assert trail[0]["provenance"] == "ai_human"
    assert trail[0]["actor"] == "e1"


def test_gradebook_only_counts_finalized(store):
    exam = seed_exam(store)
    submit(store, exam, "q1", "a")
    submit(store, exam, "q2", "text")
    suggest_grade(store, exam.exam_id, "q1", "s1")
    suggest_grade(store, exam.exam_id, "q2", "s1")
    decide_grade(store, exam.exam_id, "q1", "s1", "accepted", actor="e1")

    rows = gradebook_rows(store)
    assert [(r.q_id, r.provenance) for r in rows] == [("q1", Provenance.AI_HUMAN)]

    csv_text = export_gradebook(store)
    lines = csv_text.strip().splitlines()
    assert lines[0].startswith("student_id,exam_id,q_id")
    assert len(lines) == 2
