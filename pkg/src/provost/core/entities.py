"""The unified academic entity model.

Eleven referenceable entity kinds plus the two relationship records
(enrollment, attendance) that hang off them. Relationship records derive
their storage key from their natural key, which makes the uniqueness
invariants (one enrollment per student/offering, one attendance row per
session) structural rather than checked.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from enum import Enum
from typing import Callable

from provost.core.registry import record
from provost.errors import ValidationError

ENTITY_KINDS = frozenset(
    {
        "institution",
        "building",
        "classroom",
        "college",
        "department",
        "program",
        "course",
        "offering",
        "term",
        "student",
        "employee",
    }
)

Lookup = Callable[[str, str], object]


@dataclass(frozen=True, order=True)
class EntityId:
    kind: str
    key: str

    def __post_init__(self):
        if self.kind not in ENTITY_KINDS:
            raise ValidationError(f"unknown entity kind {self.kind!r}", field="kind")
        if not self.key:
            raise ValidationError("entity key must be non-empty", field="key")

    def __str__(self) -> str:
        return f"{self.kind}:{self.key}"


class SessionSlot(str, Enum):
    MORNING = "morning"
    AFTERNOON = "afternoon"


class EnrollmentStatus(str, Enum):
    ACTIVE = "active"
    WITHDRAWN = "withdrawn"


class AttendanceStatus(str, Enum):
    PRESENT = "present"
    LATE = "late"
    ABSENT = "absent"
    EXCUSED = "excused"


def _require_key(key: str, errors: list, field_name: str = "key") -> None:
    if not isinstance(key, str) or not key:
        errors.append((field_name, "must be a non-empty string"))


def _parse_date(value, field_name: str) -> date:
    if isinstance(value, date):
        return value
    try:
        return date.fromisoformat(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{field_name} is not an ISO-8601 date: {value!r}", field=field_name)


# ---------------------------------------------------------------------------
# organizational entities


@record
@dataclass(frozen=True)
class Institution:
    KIND = "institution"
    key: str
    name: str

    def storage_key(self) -> str:
        return self.key

    def to_payload(self) -> dict:
        return {"key": self.key, "name": self.name}

    @classmethod
    def from_payload(cls, p: dict) -> "Institution":
        return cls(key=p["key"], name=p["name"])

    def field_errors(self):
        errors: list = []
        _require_key(self.key, errors)
        return errors

    def references(self):
        return []


@record
@dataclass(frozen=True)
class Building:
    KIND = "building"
    key: str
    institution: str
    name: str

    def storage_key(self) -> str:
        return self.key

    def to_payload(self) -> dict:
        return {"key": self.key, "institution": self.institution, "name": self.name}

    @classmethod
    def from_payload(cls, p: dict) -> "Building":
        return cls(key=p["key"], institution=p["institution"], name=p["name"])

    def field_errors(self):
        errors: list = []
        _require_key(self.key, errors)
        return errors

    def references(self):
        return [("institution", "institution", self.institution)]


@record
@dataclass(frozen=True)
class Classroom:
    KIND = "classroom"
    key: str
    building: str
    name: str

    def storage_key(self) -> str:
        return self.key

    def to_payload(self) -> dict:
        return {"key": self.key, "building": self.building, "name": self.name}

    @classmethod
    def from_payload(cls, p: dict) -> "Classroom":
        return cls(key=p["key"], building=p["building"], name=p["name"])

    def field_errors(self):
        errors: list = []
        _require_key(self.key, errors)
        return errors

    def references(self):
        return [("building", "building", self.building)]


@record
@dataclass(frozen=True)
class College:
    KIND = "college"
    key: str
    institution: str
    name: str

    def storage_key(self) -> str:
        return self.key

    def to_payload(self) -> dict:
        return {"key": self.key, "institution": self.institution, "name": self.name}

    @classmethod
    def from_payload(cls, p: dict) -> "College":
        return cls(key=p["key"], institution=p["institution"], name=p["name"])

    def field_errors(self):
        errors: list = []
        _require_key(self.key, errors)
        return errors

    def references(self):
        return [("institution", "institution", self.institution)]


@record
@dataclass(frozen=True)
class Department:
    KIND = "department"
    key: str
    college: str
    name: str

    def storage_key(self) -> str:
        return self.key

    def to_payload(self) -> dict:
        return {"key": self.key, "college": self.college, "name": self.name}

    @classmethod
    def from_payload(cls, p: dict) -> "Department":
        return cls(key=p["key"], college=p["college"], name=p["name"])

    def field_errors(self):
        errors: list = []
        _require_key(self.key, errors)
        return errors

    def references(self):
        return [("college", "college", self.college)]


@record
@dataclass(frozen=True)
class Program:
    """A degree program; `courses` is its curriculum (course keys)."""

    KIND = "program"
    key: str
    department: str
    name: str
    courses: tuple[str, ...] = ()

    def storage_key(self) -> str:
        return self.key

    def to_payload(self) -> dict:
        return {
            "key": self.key,
            "department": self.department,
            "name": self.name,
            "courses": list(self.courses),
        }

    @classmethod
    def from_payload(cls, p: dict) -> "Program":
        return cls(
            key=p["key"],
            department=p["department"],
            name=p["name"],
            courses=tuple(p.get("courses", [])),
        )

    def field_errors(self):
        errors: list = []
        _require_key(self.key, errors)
        if len(set(self.courses)) != len(self.courses):
            errors.append(("courses", "duplicate course keys"))
        return errors

    def references(self):
        refs = [("department", "department", self.department)]
        refs.extend(("courses", "course", c) for c in self.courses)
        return refs


@record
@dataclass(frozen=True)
class Course:
    KIND = "course"
    key: str
    department: str
    title: str

    def storage_key(self) -> str:
        return self.key

    def to_payload(self) -> dict:
        return {"key": self.key, "department": self.department, "title": self.title}

    @classmethod
    def from_payload(cls, p: dict) -> "Course":
        return cls(key=p["key"], department=p["department"], title=p["title"])

    def field_errors(self):
        errors: list = []
        _require_key(self.key, errors)
        return errors

    def references(self):
        return [("department", "department", self.department)]


@record
@dataclass(frozen=True)
class Term:
    KIND = "term"
    key: str
    label: str
    start_date: date
    end_date: date

    def storage_key(self) -> str:
        return self.key

    def to_payload(self) -> dict:
        return {
            "key": self.key,
            "label": self.label,
            "start_date": self.start_date.isoformat(),
            "end_date": self.end_date.isoformat(),
        }

    @classmethod
    def from_payload(cls, p: dict) -> "Term":
        return cls(
            key=p["key"],
            label=p["label"],
            start_date=_parse_date(p["start_date"], "start_date"),
            end_date=_parse_date(p["end_date"], "end_date"),
        )

    def field_errors(self):
        errors: list = []
        _require_key(self.key, errors)
        if self.start_date >= self.end_date:
            errors.append(("start_date", "start_date must precede end_date"))
        return errors

    def references(self):
        return []


@record
@dataclass(frozen=True)
class Student:
    KIND = "student"
    key: str
    name: str

    def storage_key(self) -> str:
        return self.key

    def to_payload(self) -> dict:
        return {"key": self.key, "name": self.name}

    @classmethod
    def from_payload(cls, p: dict) -> "Student":
        return cls(key=p["key"], name=p["name"])

    def field_errors(self):
        errors: list = []
        _require_key(self.key, errors)
        return errors

    def references(self):
        return []


@record
@dataclass(frozen=True)
class Employee:
    KIND = "employee"
    key: str
    name: str

    def storage_key(self) -> str:
        return self.key

    def to_payload(self) -> dict:
        return {"key": self.key, "name": self.name}

    @classmethod
    def from_payload(cls, p: dict) -> "Employee":
        return cls(key=p["key"], name=p["name"])

    def field_errors(self):
        errors: list = []
        _require_key(self.key, errors)
        return errors

    def references(self):
        return []


# ---------------------------------------------------------------------------
# scheduling and relationship records


@dataclass(frozen=True)
class Session:
    index: int
    date: date
    slot: SessionSlot

    def to_payload(self) -> dict:
        return {"index": self.index, "date": self.date.isoformat(), "slot": self.slot.value}

    @classmethod
    def from_payload(cls, p: dict) -> "Session":
        return cls(
            index=int(p["index"]),
            date=_parse_date(p["date"], "sessions.date"),
            slot=SessionSlot(p["slot"]),
        )


@record
@dataclass(frozen=True)
class CourseOffering:
    KIND = "offering"
    key: str
    course: str
    term: str
    instructor: str
    sessions: tuple[Session, ...] = ()

    def storage_key(self) -> str:
        return self.key

    def to_payload(self) -> dict:
        return {
            "key": self.key,
            "course": self.course,
            "term": self.term,
            "instructor": self.instructor,
            "sessions": [s.to_payload() for s in self.sessions],
        }

    @classmethod
    def from_payload(cls, p: dict) -> "CourseOffering":
        return cls(
            key=p["key"],
            course=p["course"],
            term=p["term"],
            instructor=p["instructor"],
            sessions=tuple(Session.from_payload(s) for s in p.get("sessions", [])),
        )

    def field_errors(self):
        errors: list = []
        _require_key(self.key, errors)
        indexes = [s.index for s in self.sessions]
        if indexes != list(range(1, len(indexes) + 1)):
            errors.append(("sessions", "session indexes must be contiguous from 1"))
        return errors

    def references(self):
        return [
            ("course", "course", self.course),
            ("term", "term", self.term),
            ("instructor", "employee", self.instructor),
        ]

    def contextual_errors(self, lookup: Lookup):
        errors: list = []
        term = lookup("term", self.term)
        if term is not None:
            for s in self.sessions:
                if not (term.start_date <= s.date <= term.end_date):
                    errors.append(
                        ("sessions", f"session {s.index} on {s.date.isoformat()} is outside term {self.term}")
                    )
        return errors

    def session_by_index(self, index: int) -> Session | None:
        if 1 <= index <= len(self.sessions):
            return self.sessions[index - 1]
        return None


@record
@dataclass(frozen=True)
class Enrollment:
    KIND = "enrollment"
    student: str
    offering: str
    status: EnrollmentStatus = EnrollmentStatus.ACTIVE

    def storage_key(self) -> str:
        return f"{self.student}~{self.offering}"

    def to_payload(self) -> dict:
        return {"student": self.student, "offering": self.offering, "status": self.status.value}

    @classmethod
    def from_payload(cls, p: dict) -> "Enrollment":
        return cls(
            student=p["student"],
            offering=p["offering"],
            status=EnrollmentStatus(p["status"]),
        )

    def field_errors(self):
        errors: list = []
        _require_key(self.student, errors, "student")
        _require_key(self.offering, errors, "offering")
        return errors

    def references(self):
        return [("student", "student", self.student), ("offering", "offering", self.offering)]


@record
@dataclass(frozen=True)
class AttendanceRecord:
    KIND = "attendance"
    student: str
    offering: str
    session_index: int
    status: AttendanceStatus

    def storage_key(self) -> str:
        return f"{self.student}~{self.offering}~{self.session_index}"

    def to_payload(self) -> dict:
        return {
            "student": self.student,
            "offering": self.offering,
            "session_index": self.session_index,
            "status": self.status.value,
        }

    @classmethod
    def from_payload(cls, p: dict) -> "AttendanceRecord":
        return cls(
            student=p["student"],
            offering=p["offering"],
            session_index=int(p["session_index"]),
            status=AttendanceStatus(p["status"]),
        )

    def field_errors(self):
        errors: list = []
        _require_key(self.student, errors, "student")
        _require_key(self.offering, errors, "offering")
        if self.session_index < 1:
            errors.append(("session_index", "must be >= 1"))
        return errors

    def references(self):
        # the active-enrollment requirement is a reference: a missing row is
        # an integrity problem, not a field problem
        return [
            ("student", "student", self.student),
            ("offering", "offering", self.offering),
            ("enrollment", "enrollment", f"{self.student}~{self.offering}"),
        ]

    def contextual_errors(self, lookup: Lookup):
        errors: list = []
        offering = lookup("offering", self.offering)
        if offering is not None and offering.session_by_index(self.session_index) is None:
            errors.append(
                ("session_index", f"session {self.session_index} not in schedule of offering {self.offering}")
            )
        return errors

    def write_errors(self, lookup: Lookup):
        # enforced at write time only: a later withdrawal does not taint
        # attendance that was legitimately recorded while active
        enrollment = lookup("enrollment", f"{self.student}~{self.offering}")
        if enrollment is not None and enrollment.status is not EnrollmentStatus.ACTIVE:
            return [
                ("student", f"student {self.student} is not actively enrolled in offering {self.offering}")
            ]
        return []
