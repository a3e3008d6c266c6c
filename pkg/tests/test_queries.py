"""Attendance query semantics: rates, scopes, windows, streaks."""

from datetime import date, timedelta

import pytest

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
    Session,
    SessionSlot,
    Student,
    Term,
)
from provost.core.queries import (
    absence_streak,
    active_students,
    attendance_rate,
    enrollment_count,
)
from provost.errors import NotFoundError, ValidationError

P = AttendanceStatus.PRESENT
L = AttendanceStatus.LATE
A = AttendanceStatus.ABSENT
E = AttendanceStatus.EXCUSED


def seed(store, statuses):
    """One offering with daily morning sessions; one student with the
    given per-session statuses."""
    store.upsert(Institution("i1", "Test U"))
    store.upsert(College("k1", "i1", "Engineering"))
    store.upsert(Department("d1", "k1", "Computing"))
    store.upsert(Course("c1", "d1", "Intro"))
    store.upsert(Term("t1", "2025 Fall", date(2025, 9, 8), date(2025, 12, 26)))
    store.upsert(Employee("e1", "Grace"))
    sessions = tuple(
        Session(i + 1, date(2025, 9, 8) + timedelta(days=i), SessionSlot.MORNING)
        for i in range(len(statuses))
    )
    store.upsert(CourseOffering("c1-t1", "c1", "t1", "e1", sessions=sessions))
    store.upsert(Student("s1", "Ada"))
    store.upsert(Enrollment("s1", "c1-t1"))
    for i, status in enumerate(statuses):
        store.upsert(AttendanceRecord("s1", "c1-t1", i + 1, status))


def test_present_and_late_both_count_as_attended(store):
    seed(store, [P, L, A, A])
    assert attendance_rate(store, "student", "s1") == pytest.approx(0.5)


def test_excused_leaves_numerator_and_denominator(store):
    seed(store, [P, P, E, A])
    # 2 attended out of 3 countable; the excused row is invisible
    assert attendance_rate(store, "student", "s1") == pytest.approx(2 / 3)


def test_rate_none_without_countable_rows(store):
    seed(store, [E, E])
    assert attendance_rate(store, "student", "s1") is None


def test_rate_window_is_inclusive(store):
    seed(store, [A, P, P, A])
    window = (date(2025, 9, 9), date(2025, 9, 10))
    assert attendance_rate(store, "student", "s1", window=window) == pytest.approx(1.0)


def test_scope_rollups_agree_on_single_offering(store):
    seed(store, [P, A])
    for scope, key in (
        ("student", "s1"),
        ("offering", "c1-t1"),
        ("department", "d1"),
        ("institution", "i1"),
    ):
        assert attendance_rate(store, scope, key) == pytest.approx(0.5), scope


def test_scope_validates_key_and_name(store):
    seed(store, [P])
    with pytest.raises(NotFoundError):
        attendance_rate(store, "student", "s-missing")
    with pytest.raises(ValidationError):
        attendance_rate(store, "campus", "i1")


def test_streak_counts_trailing_absences_only(store):
    seed(store, [A, A, P, A, A, A])
    assert absence_streak(store, "s1", "c1-t1") == 3


def test_streak_reset_by_excused(store):
    seed(store, [A, A, E])
    assert absence_streak(store, "s1", "c1-t1") == 0


def test_streak_requires_enrollment(store):
    seed(store, [A])
    with pytest.raises(NotFoundError):
        absence_streak(store, "s1", "other")


def test_enrollment_count_and_active_students(store):
    seed(store, [P])
    store.upsert(Student("s2", "Grace"))
    store.upsert(Enrollment("s2", "c1-t1"))
    store.upsert(Enrollment.from_payload(
        {"student": "s2", "offering": "c1-t1", "status": "withdrawn"}
    ))
    assert enrollment_count(store, "t1") == 1
    assert active_students(store, "c1-t1") == ["s1"]


def test_pilot_fixture_headline_rates(pilot):
    rate = attendance_rate(pilot, "student", "s3")
    assert rate == pytest.approx(163 / 224)
    # the excused student is judged on countable sessions only
    assert attendance_rate(pilot, "student", "s5") == pytest.approx(196 / 210)
