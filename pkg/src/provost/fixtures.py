"""Deterministic demo dataset.

One institution, two departments, four course offerings over a fourteen
week fall term, ten students, and a full attendance plus grading history.
The numbers are tuned so that every downstream surface has something real
to show:

* student s3 lands at a 72.8% overall attendance rate with 61 absences,
  a trailing three-session streak in one course, four courses below the
  80% course target, absences peaking on Monday mornings and Friday
  afternoons, and a declining final month;
* s1 and s2 sit in warning territory on rate alone, s9 is on watch, the
  rest are safe;
* the institution as a whole runs just under its 85% attendance target,
  so the daily health check has departments and courses to drill into;
* the grade ledger exercises every decision path: machine-finalized
  multiple choice, accepted, adjusted and overridden suggestions, direct
  human entries, and two suggestions still waiting for review.

Everything is pinned: fixed dates, fixed actors, fixed timestamps, and a
deterministic allocation of absences. Building the fixture twice gives
byte-identical stores.
"""

from __future__ import annotations

from datetime import date, datetime, time, timedelta, timezone

from provost.core.entities import (
    AttendanceRecord,
    AttendanceStatus,
    College,
    Course,
    CourseOffering,
    Department,
    Employee,
    Enrollment,
    Institution,
    Program,
    Session,
    SessionSlot,
    Student,
    Term,
)
from provost.core.store import Store
from provost.grading.decisions import auto_finalize_mcq, decide_grade, suggest_grade
from provost.grading.exams import QuestionKind, create_exam
from provost.grading.graders import Submission
from provost.ingest.extractor import extract_specification
from provost.ingest.model import BloomLevel
from provost.ingest.review import confirm_draft, store_draft
from provost.outcomes.model import CLOPLOLink, Contribution, PLO

TERM_WEEKS = 14
WEEK1_MONDAY = date(2025, 9, 8)

#: the saturday after the last teaching week; reports in the demos are
#: dated here so the full term is in scope
AS_OF = date(2025, 12, 13)

FOCUS_STUDENT = "s3"

_UTC = timezone.utc
_CONFIRMED_AT = datetime(2025, 9, 5, 10, 0, tzinfo=_UTC)
_DECIDED_AT0 = datetime(2025, 12, 10, 9, 0, tzinfo=_UTC)

_MORNING = SessionSlot.MORNING
_AFTERNOON = SessionSlot.AFTERNOON

#: course -> (department, title)
_COURSES = {
    "c1": ("d1", "Introduction to Computer Systems"),
    "c2": ("d2", "Mathematics I"),
    "c3": ("d2", "Academic English"),
    "c4": ("d1", "Introduction to Digital Systems"),
}

#: weekly meeting pattern per course: (weekday, slot), monday = 0. Four
#: meetings a week for fourteen weeks makes 56 sessions per offering.
_CELLS: dict[str, tuple[tuple[int, SessionSlot], ...]] = {
    "c1": ((0, _MORNING), (1, _MORNING), (3, _MORNING), (4, _MORNING)),
    "c3": ((0, _MORNING), (1, _MORNING), (2, _MORNING), (4, _MORNING)),
    "c2": ((0, _AFTERNOON), (2, _AFTERNOON), (3, _AFTERNOON), (4, _AFTERNOON)),
    "c4": ((0, _AFTERNOON), (2, _AFTERNOON), (3, _AFTERNOON), (4, _AFTERNOON)),
}

_INSTRUCTORS = {"c1": "e1", "c2": "e2", "c3": "e3", "c4": "e4"}

_STUDENT_NAMES = {
    "s1": "Amara Diallo",
    "s2": "Bruno Keller",
    "s3": "Selin Acar",
    "s4": "Divya Nair",
    "s5": "Emre Korkmaz",
    "s6": "Farah Haddad",
    "s7": "Goran Ilic",
    "s8": "Hana Sato",
    "s9": "Ivan Petrov",
    "s10": "Jana Novak",
}

_EMPLOYEE_NAMES = {
    "e1": "Nadia Rahman",
    "e2": "Tomas Eriksen",
    "e3": "Grace Obi",
    "e4": "Meltem Aydin",
    "e5": "Omar Haddad",
}

#: absences per week for the focus student; the last-month counts rise
#: (5, 6, 7) so the weekly attendance rate strictly declines. Total 61.
_FOCUS_WEEKLY = (4, 4, 4, 4, 4, 4, 4, 4, 4, 3, 4, 5, 6, 7)

#: the final week is placed by hand: it leaves a trailing streak of
#: exactly three in c4 (wed, thu, fri absent after an attended monday)
#: and a streak of zero everywhere else
_FOCUS_LAST_WEEK = (
    ("c1", 0),
    ("c3", 0),
    ("c3", 1),
    ("c2", 0),
    ("c4", 2),
    ("c4", 3),
    ("c4", 4),
)

#: per-cell absence budgets for weeks 1..13, (course, weekday, count).
#: Monday-morning and friday-afternoon cells carry the big budgets so the
#: absence heatmap peaks there (14 each once week 14 is added); the
#: per-course totals (plus the last week) order the problem-course list
#: c4 < c3 < c1 < c2 by rate. Budgets sum to 54 = sum of the first 13
#: weekly counts.
_FOCUS_BUDGETS = (
    ("c1", 0, 6),
    ("c1", 1, 2),
    ("c1", 3, 3),
    ("c1", 4, 2),
    ("c3", 0, 6),
    ("c3", 1, 2),
    ("c3", 2, 4),
    ("c3", 4, 2),
    ("c2", 0, 2),
    ("c2", 2, 2),
    ("c2", 3, 3),
    ("c2", 4, 6),
    ("c4", 0, 3),
    ("c4", 2, 2),
    ("c4", 3, 2),
    ("c4", 4, 7),
)

#: absences per week for everyone else, taken from the front of the
#: week's session list (sorted by weekday, slot, course). Keeping them at
#: the start of the week means every trailing streak resets by friday.
_REGULAR_WEEKLY = {
    "s1": 5,
    "s2": 6,
    "s4": 0,
    "s5": 1,
    "s6": 1,
    "s7": 2,
    "s8": 2,
    "s9": 3,
    "s10": 0,
}

#: students whose cell right after the absent ones is excused each week
_EXCUSED_ONE = ("s5",)

_SPEC_SOURCES = {
    "c1": """\
COURSE: c1
CLO c1.1 [remember]: Describe the layered organization of a modern computer system.
CLO c1.2 [understand]: Explain how programs are represented and executed at the machine level.
CLO c1.3 [apply]: Trace short assembly fragments for a simple load-store machine.
TOPIC: Data representation
TOPIC: Instruction set architecture
TOPIC: Memory hierarchy
ASSESS: Final exam, 0.5
ASSESS: Midterm exam, 0.3
ASSESS: Laboratory work, 0.2
BOOK: Computer Organization and Design
""",
    "c2": """\
COURSE: c2
CLO c2.1 [remember]: State the limit, continuity and differentiability definitions precisely.
CLO c2.2 [apply]: Differentiate and integrate elementary functions of one variable.
CLO c2.3 [analyze]: Analyze convergence of sequences and series with standard tests.
TOPIC: Limits and continuity
TOPIC: Differentiation
TOPIC: Integration
ASSESS: Final exam, 0.6
ASSESS: Midterm exam, 0.4
BOOK: Calculus: Early Transcendentals
""",
    "c3": """\
COURSE: c3
CLO c3.1 [understand]: Identify the structure of academic articles and reports.
CLO c3.2 [create]: Write coherent technical paragraphs with correct citation practice.
CLO c3.3 [evaluate]: Critique peer writing against a shared rubric.
TOPIC: Paragraph structure
TOPIC: Citation and paraphrase
TOPIC: Technical reporting
ASSESS: Portfolio, 0.5
ASSESS: Final exam, 0.5
BOOK: Academic Writing for Engineers
""",
    "c4": """\
COURSE: c4
CLO c4.1 [remember]: Describe number systems and binary codes used in digital design.
CLO c4.2 [apply]: Design combinational circuits from boolean specifications.
CLO c4.3 [analyze]: Analyze sequential circuits built from flip-flops.
TOPIC: Boolean algebra
TOPIC: Combinational logic
TOPIC: Sequential logic
ASSESS: Final exam, 0.5
ASSESS: Midterm exam, 0.3
ASSESS: Laboratory work, 0.2
BOOK: Digital Design
""",
}

#: program p1 curriculum map; every CLO links somewhere (so the audit is
#: clean) and both outcomes get direct coverage
_PLO_LINKS = (
    ("c1", "c1.1", "plo1", Contribution.DIRECT),
    ("c1", "c1.2", "plo1", Contribution.DIRECT),
    ("c1", "c1.3", "plo1", Contribution.SUPPORTING),
    ("c2", "c2.1", "plo1", Contribution.DIRECT),
    ("c2", "c2.2", "plo1", Contribution.DIRECT),
    ("c2", "c2.3", "plo1", Contribution.SUPPORTING),
    ("c3", "c3.1", "plo2", Contribution.DIRECT),
    ("c3", "c3.2", "plo2", Contribution.DIRECT),
    ("c3", "c3.3", "plo2", Contribution.DIRECT),
    ("c3", "c3.3", "plo1", Contribution.INDIRECT),
    ("c4", "c4.1", "plo1", Contribution.DIRECT),
    ("c4", "c4.2", "plo1", Contribution.DIRECT),
    ("c4", "c4.3", "plo1", Contribution.DIRECT),
)

_BLUEPRINTS = {
    "c1": (
        (QuestionKind.MCQ, ("c1.1",), BloomLevel.REMEMBER, 5.0),
        (QuestionKind.ESSAY, ("c1.2",), BloomLevel.UNDERSTAND, 10.0),
        (QuestionKind.CODE, ("c1.2", "c1.3"), BloomLevel.APPLY, 10.0),
        (QuestionKind.HANDWRITTEN, ("c1.3",), BloomLevel.ANALYZE, 5.0),
    ),
    "c2": (
        (QuestionKind.MCQ, ("c2.1",), BloomLevel.REMEMBER, 5.0),
        (QuestionKind.HANDWRITTEN, ("c2.2",), BloomLevel.APPLY, 10.0),
        (QuestionKind.HANDWRITTEN, ("c2.2", "c2.3"), BloomLevel.ANALYZE, 10.0),
        (QuestionKind.ESSAY, ("c2.3",), BloomLevel.UNDERSTAND, 5.0),
    ),
    "c3": (
        (QuestionKind.MCQ, ("c3.1",), BloomLevel.REMEMBER, 5.0),
        (QuestionKind.ESSAY, ("c3.2",), BloomLevel.UNDERSTAND, 10.0),
        (QuestionKind.ESSAY, ("c3.2", "c3.3"), BloomLevel.CREATE, 10.0),
        (QuestionKind.HANDWRITTEN, ("c3.3",), BloomLevel.APPLY, 5.0),
    ),
    "c4": (
        (QuestionKind.MCQ, ("c4.1",), BloomLevel.REMEMBER, 5.0),
        (QuestionKind.CODE, ("c4.2",), BloomLevel.APPLY, 10.0),
        (QuestionKind.HANDWRITTEN, ("c4.2", "c4.3"), BloomLevel.ANALYZE, 10.0),
        (QuestionKind.ESSAY, ("c4.3",), BloomLevel.EVALUATE, 5.0),
    ),
}

#: rubric criteria the stub generator attaches to non-mcq questions; the
#: crafted answers below name the first k of them to earn k quarters
_CRITERIA = ("correctness", "completeness", "clarity", "rigor")

#: (student, course, question) left in the suggested state so the review
#: queue is not empty in the demo
_LEFT_SUGGESTED = {("s9", "c1", "q3"), ("s10", "c1", "q3")}


def offering_key(course: str) -> str:
    return f"{course}-2025f"


def exam_key(course: str) -> str:
    return f"{offering_key(course)}-exam1"


def _focus_allocation() -> dict[int, list[tuple[str, int]]]:
    """Spread the focus student's weekly counts over the cell budgets.

    Greedy by remaining budget, never the same cell twice in one week;
    ties fall back to budget order. The asserts guard the hand-tuned
    numbers: every weekly count must be satisfiable and every budget must
    drain exactly.
    """
    remaining = {i: count for i, (_, _, count) in enumerate(_FOCUS_BUDGETS)}
    weeks: dict[int, list[tuple[str, int]]] = {}
    for week, count in enumerate(_FOCUS_WEEKLY[:-1]):
        picks = sorted(remaining, key=lambda i: (-remaining[i], i))[:count]
        assert len(picks) == count and all(remaining[i] > 0 for i in picks), (
            f"week {week + 1}: cannot place {count} absences"
        )
        for i in picks:
            remaining[i] -= 1
        weeks[week] = [_FOCUS_BUDGETS[i][:2] for i in sorted(picks)]
    assert not any(remaining.values()), f"unspent budgets: {remaining}"
    weeks[TERM_WEEKS - 1] = list(_FOCUS_LAST_WEEK)
    return weeks


def _session_index(course: str, week: int, weekday: int) -> int:
    cells = _CELLS[course]
    for pos, (wd, _) in enumerate(cells):
        if wd == weekday:
            return week * len(cells) + pos + 1
    raise KeyError(f"{course} has no session on weekday {weekday}")


def _week_cells() -> list[tuple[str, int]]:
    """One week's sessions as (course, weekday), in timetable order."""
    slot_rank = {_MORNING: 0, _AFTERNOON: 1}
    cells = [
        (weekday, slot_rank[slot], course)
        for course, pattern in _CELLS.items()
        for weekday, slot in pattern
    ]
    return [(course, weekday) for weekday, _, course in sorted(cells)]


def _build_entities(store: Store) -> None:
    store.upsert(Institution(key="i1", name="Meridian Technical University"))
    store.upsert(College(key="k1", institution="i1", name="College of Engineering"))
    store.upsert(Department(key="d1", college="k1", name="Computer Engineering"))
    store.upsert(Department(key="d2", college="k1", name="General Education"))
    for course, (department, title) in _COURSES.items():
        store.upsert(Course(key=course, department=department, title=title))
    store.upsert(
        Term(
            key="t1",
            label="2025 Fall",
            start_date=WEEK1_MONDAY,
            end_date=date(2025, 12, 26),
        )
    )
    for key, name in _EMPLOYEE_NAMES.items():
        store.upsert(Employee(key=key, name=name))
    for key, name in _STUDENT_NAMES.items():
        store.upsert(Student(key=key, name=name))
    store.upsert(
        Program(
            key="p1",
            department="d1",
            name="Computer Engineering B.S.",
            courses=tuple(_COURSES),
        )
    )
    store.upsert(
        PLO(
            program="p1",
            plo_id="plo1",
            statement=(
                "Apply knowledge of mathematics, science and engineering "
                "to computing problems."
            ),
            abet_criterion="1",
        )
    )
    store.upsert(
        PLO(
            program="p1",
            plo_id="plo2",
            statement=(
                "Communicate effectively in written and spoken "
                "professional contexts."
            ),
            abet_criterion="3",
        )
    )


def _build_offerings(store: Store) -> None:
    for course, pattern in _CELLS.items():
        sessions = []
        for week in range(TERM_WEEKS):
            for pos, (weekday, slot) in enumerate(pattern):
                sessions.append(
                    Session(
                        index=week * len(pattern) + pos + 1,
                        date=WEEK1_MONDAY + timedelta(weeks=week, days=weekday),
                        slot=slot,
                    )
                )
        store.upsert(
            CourseOffering(
                key=offering_key(course),
                course=course,
                term="t1",
                instructor=_INSTRUCTORS[course],
                sessions=tuple(sessions),
            )
        )
    for student in _STUDENT_NAMES:
        for course in _COURSES:
            store.upsert(Enrollment(student=student, offering=offering_key(course)))


def _build_attendance(store: Store) -> None:
    overrides: dict[tuple[str, str, int], AttendanceStatus] = {}

    for week, picks in _focus_allocation().items():
        for course, weekday in picks:
            index = _session_index(course, week, weekday)
            overrides[(FOCUS_STUDENT, course, index)] = AttendanceStatus.ABSENT

    week_cells = _week_cells()
    for student, count in _REGULAR_WEEKLY.items():
        statuses = [AttendanceStatus.ABSENT] * count
        if student in _EXCUSED_ONE:
            statuses.append(AttendanceStatus.EXCUSED)
        for week in range(TERM_WEEKS):
            for (course, weekday), status in zip(week_cells, statuses):
                index = _session_index(course, week, weekday)
                overrides[(student, course, index)] = status

    for student in _STUDENT_NAMES:
        for course, pattern in _CELLS.items():
            for index in range(1, TERM_WEEKS * len(pattern) + 1):
                status = overrides.get(
                    (student, course, index), AttendanceStatus.PRESENT
                )
                store.upsert(
                    AttendanceRecord(
                        student=student,
                        offering=offering_key(course),
                        session_index=index,
                        status=status,
                    )
                )


def _build_specifications(store: Store) -> None:
    for course in _COURSES:
        draft = extract_specification(_SPEC_SOURCES[course])
        store_draft(store, draft)
        confirm_draft(store, draft, reviewer="e5", at=_CONFIRMED_AT)
    for course, clo_id, plo_id, contribution in _PLO_LINKS:
        store.upsert(
            CLOPLOLink(
                program="p1",
                course=course,
                clo_id=clo_id,
                plo_id=plo_id,
                contribution=contribution,
            )
        )


def _answer_for(store: Store, course: str, q_id: str, student: str) -> str:
    """Craft an answer with a known grade.

    Multiple choice answers match the key unless the (student, course)
    blend says otherwise; free-text answers name the first k rubric
    criteria so the rubric grader awards exactly k quarters.
    """
    exam = store.require("exam", exam_key(course))
    question = exam.question_by_id(q_id)
    si = int(student[1:])
    ci = int(course[1:])
    qi = int(q_id[1:])
    if question.kind is QuestionKind.MCQ:
        if (si + ci) % 4 == 0:
            wrong = "abcd"[("abcd".index(question.answer_key) + 1) % 4]
            return wrong
        return question.answer_key
    k = (si + ci + qi) % 5
    mentioned = ", ".join(_CRITERIA[:k]) if k else "none of the criteria"
    return f"Answer by {student} to {q_id}, addressing: {mentioned}."


def _build_grading(store: Store) -> None:
    for course in _COURSES:
        create_exam(store, offering_key(course), list(_BLUEPRINTS[course]))

    ticks = 0
    for course in _COURSES:
        exam_id = exam_key(course)
        instructor = _INSTRUCTORS[course]
        ci = int(course[1:])
        for student in _STUDENT_NAMES:
            si = int(student[1:])
            for qi in range(1, 5):
                q_id = f"q{qi}"
                store.upsert(
                    Submission(
                        exam_id=exam_id,
                        q_id=q_id,
                        student=student,
                        answer_text=_answer_for(store, course, q_id, student),
                    )
                )
                at = _DECIDED_AT0 + timedelta(minutes=ticks)
                ticks += 1
                if qi == 1:
                    auto_finalize_mcq(store, exam_id, q_id, student, 3, at=at)
                elif qi == 4:
                    question = store.require("exam", exam_id).question_by_id(q_id)
                    decide_grade(
                        store,
                        exam_id,
                        q_id,
                        student,
                        "human_direct",
                        actor=instructor,
                        points=question.max_points * ((si + 2 * ci) % 5) / 4,
                        feedback="Graded on paper.",
                        at=at,
                    )
                else:
                    suggestion = suggest_grade(store, exam_id, q_id, student)
                    if (student, course, q_id) in _LEFT_SUGGESTED:
                        continue
                    turn = (si + ci + qi) % 3
                    if turn == 0:
                        decide_grade(
                            store, exam_id, q_id, student, "accepted",
                            actor=instructor, at=at,
                        )
                    elif turn == 1:
                        question = store.require("exam", exam_id).question_by_id(q_id)
                        decide_grade(
                            store, exam_id, q_id, student, "adjusted",
                            actor=instructor,
                            points=min(question.max_points, suggestion.points + 1.0),
                            feedback="Partial credit for the outline.",
                            at=at,
                        )
                    else:
                        question = store.require("exam", exam_id).question_by_id(q_id)
                        decide_grade(
                            store, exam_id, q_id, student, "overridden",
                            actor=instructor,
                            points=question.max_points / 2,
                            feedback="Regraded against the printed rubric.",
                            at=at,
                        )


def build_fixture(store: Store) -> None:
    """Populate an empty store with the demo dataset."""
    _build_entities(store)
    _build_offerings(store)
    _build_attendance(store)
    _build_specifications(store)
    _build_grading(store)
