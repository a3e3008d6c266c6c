"""Attendance and enrollment queries over the record store.

All computations here return full-precision fractions; rounding happens at
report rendering, never inside a query. An empty denominator is reported as
None (explicit "no data"), never as 0: a student with only excused sessions
has no attendance rate, not a zero one.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

from provost.core.entities import AttendanceStatus, EnrollmentStatus
from provost.core.store import Store
from provost.errors import ValidationError

ATTENDED = frozenset({AttendanceStatus.PRESENT, AttendanceStatus.LATE})

#: scope kinds accepted by attendance_rate
RATE_SCOPES = ("student", "offering", "department", "institution")


@dataclass(frozen=True)
class AttendanceEvent:
    """One attendance row joined with its scheduled session."""

    student: str
    offering: str
    course: str
    session_index: int
    date: date
    slot: str
    status: AttendanceStatus

    @property
    def weekday(self) -> str:
        return self.date.strftime("%A")


def attendance_events(
    store: Store,
    *,
    student: str | None = None,
    offerings: set[str] | None = None,
    window: tuple[date, date] | None = None,
) -> list[AttendanceEvent]:
    """Attendance rows joined with session date and slot, filtered by
    student, offering set, and inclusive date window. The shared primitive
    under every rate, streak, and pattern computation."""
    events: list[AttendanceEvent] = []
    for rec in store.list("attendance"):
        if student is not None and rec.student != student:
            continue
        if offerings is not None and rec.offering not in offerings:
            continue
        offering = store.require("offering", rec.offering)
        session = offering.session_by_index(rec.session_index)
        if window is not None and not (window[0] <= session.date <= window[1]):
            continue
        events.append(
            AttendanceEvent(
                student=rec.student,
                offering=rec.offering,
                course=offering.course,
                session_index=rec.session_index,
                date=session.date,
                slot=session.slot.value,
                status=rec.status,
            )
        )
    return events


def rate_of(events: list[AttendanceEvent]) -> float | None:
    """(present + late) / (present + late + absent); excused rows are
    neutral. None when nothing countable remains."""
    attended = sum(1 for e in events if e.status in ATTENDED)
    countable = sum(1 for e in events if e.status is not AttendanceStatus.EXCUSED)
    if countable == 0:
        return None
    return attended / countable


def offerings_in_scope(store: Store, scope: str, key: str) -> set[str] | None:
    """Offering keys covered by a rate scope; None means no restriction."""
    if scope == "student":
        store.require("student", key)
        return None
    if scope == "offering":
        store.require("offering", key)
        return {key}
    if scope == "department":
        store.require("department", key)
        courses = {c.key for c in store.list("course") if c.department == key}
        return {o.key for o in store.list("offering") if o.course in courses}
    if scope == "institution":
        store.require("institution", key)
        colleges = {c.key for c in store.list("college") if c.institution == key}
        departments = {d.key for d in store.list("department") if d.college in colleges}
        courses = {c.key for c in store.list("course") if c.department in departments}
        return {o.key for o in store.list("offering") if o.course in courses}
    raise ValidationError(f"unknown rate scope {scope!r}", field="scope")


def attendance_rate(
    store: Store,
    scope: str,
    key: str,
    window: tuple[date, date] | None = None,
) -> float | None:
    offerings = offerings_in_scope(store, scope, key)
    student = key if scope == "student" else None
    if offerings is not None and not offerings:
        return None
    events = attendance_events(store, student=student, offerings=offerings, window=window)
    return rate_of(events)


def absence_streak(store: Store, student: str, offering: str) -> int:
    """Length of the trailing run of `absent` rows, ordered by session
    index. present, late, and excused all reset the run."""
    store.require("enrollment", f"{student}~{offering}")
    rows = [
        rec
        for rec in store.list("attendance")
        if rec.student == student and rec.offering == offering
    ]
    rows.sort(key=lambda rec: rec.session_index)
    streak = 0
    for rec in rows:
        if rec.status is AttendanceStatus.ABSENT:
            streak += 1
        else:
            streak = 0
    return streak


def enrollment_count(store: Store, term: str) -> int:
    """Distinct students holding at least one active enrollment in any
    offering of the term."""
    store.require("term", term)
    offerings = {o.key for o in store.list("offering") if o.term == term}
    students = {
        e.student
        for e in store.list("enrollment")
        if e.offering in offerings and e.status is EnrollmentStatus.ACTIVE
    }
    return len(students)


def active_students(store: Store, offering: str) -> list[str]:
    """Students actively enrolled in one offering, sorted by key."""
    store.require("offering", offering)
    return sorted(
        e.student
        for e in store.list("enrollment")
        if e.offering == offering and e.status is EnrollmentStatus.ACTIVE
    )
