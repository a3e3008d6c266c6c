"""Entity payload round trips and CSV import behavior."""

from datetime import date

import pytest

from provost.core.csvio import import_csv
from provost.core.entities import (
    AttendanceStatus,
    College,
    Course,
    CourseOffering,
    Department,
    Employee,
    Enrollment,
    EnrollmentStatus,
    Institution,
    Session,
    SessionSlot,
    Student,
    Term,
)
from provost.core.store import RECORD_TYPES
from provost.errors import ValidationError


def seed_minimal(store):
    store.upsert(Institution("i1", "Test U"))
    store.upsert(College("k1", "i1", "Engineering"))
    store.upsert(Department("d1", "k1", "Computing"))
    store.upsert(Course("c1", "d1", "Intro"))
    store.upsert(Term("t1", "2025 Fall", date(2025, 9, 8), date(2025, 12, 26)))
    store.upsert(Employee("e1", "Grace"))
    store.upsert(
        CourseOffering(
            "c1-t1", "c1", "t1", "e1",
            sessions=(Session(1, date(2025, 9, 8), SessionSlot.MORNING),),
        )
    )
    store.upsert(Student("s1", "Ada"))
    store.upsert(Enrollment("s1", "c1-t1", EnrollmentStatus.ACTIVE))


@pytest.mark.parametrize("kind", sorted(set(RECORD_TYPES) & {
    "institution", "college", "department", "course", "term",
    "employee", "offering", "student", "enrollment",
}))
def test_payload_round_trip(store, kind):
    seed_minimal(store)
    for rec in store.list(kind):
        cls = RECORD_TYPES[kind]
        assert cls.from_payload(rec.to_payload()) == rec


def test_offering_sessions_ordered_and_unique(store):
    seed_minimal(store)
    bad = CourseOffering(
        "c1-x", "c1", "t1", "e1",
        sessions=(
            Session(2, date(2025, 9, 9), SessionSlot.MORNING),
            Session(2, date(2025, 9, 10), SessionSlot.MORNING),
        ),
    )
    with pytest.raises(ValidationError):
        store.upsert(bad)


def test_import_students_happy_path(store):
    summary = import_csv(store, "student", "student_id,name\ns1,Ada\ns2,Grace\n")
    assert summary.accepted == 2
    assert summary.rejected == ()
    assert store.get("student", "s2").name == "Grace"


def test_import_reports_bad_rows_with_line_numbers(store):
    seed_minimal(store)
    csv_text = (
        "student_id,offering_id,session_index,status\n"
        "s1,c1-t1,1,present\n"
        "s1,c1-t1,not-a-number,present\n"
        "s1,c1-t1,1\n"
        "s1,nowhere,1,present\n"
        "s1,c1-t1,1,vanished\n"
    )
    summary = import_csv(store, "attendance", csv_text)
    assert summary.accepted == 1
    lines = [line for line, _ in summary.rejected]
    assert lines == [3, 4, 5, 6]
    reasons = dict(summary.rejected)
    assert "integer" in reasons[3]
    assert "columns" in reasons[4]
    assert "missing offering" in reasons[5]
    assert "status" in reasons[6]


def test_import_rejects_unknown_kind_and_bad_header(store):
    with pytest.raises(ValidationError):
        import_csv(store, "building", "a,b\n")
    with pytest.raises(ValidationError) as exc:
        import_csv(store, "student", "id,name\ns1,Ada\n")
    assert exc.value.field == "header"


def test_import_is_upsert(store):
    import_csv(store, "student", "student_id,name\ns1,Ada\n")
    import_csv(store, "student", "student_id,name\ns1,Ada Lovelace\n")
    assert store.get("student", "s1").name == "Ada Lovelace"
    assert store.revision("student", "s1") == 2


def test_attendance_payload_values():
    rec = RECORD_TYPES["attendance"](
        student="s1", offering="o1", session_index=3, status=AttendanceStatus.LATE
    )
    assert rec.to_payload() == {
        "student": "s1", "offering": "o1", "session_index": 3, "status": "late",
    }
