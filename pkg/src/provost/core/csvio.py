"""CSV import with per-row acceptance.

A file is never all-or-nothing: every valid row is upserted, every bad row
is reported with its 1-based line number (the header is line 1) and a
reason. Only a malformed header rejects the whole file.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from provost.core.entities import (
    AttendanceRecord,
    AttendanceStatus,
    Course,
    Employee,
    Enrollment,
    EnrollmentStatus,
    Student,
)
from provost.core.store import Store
from provost.errors import ProvostError, ValidationError

#: exact, ordered headers per importable kind
HEADERS: dict[str, list[str]] = {
    "attendance": ["student_id", "offering_id", "session_index", "status"],
    "enrollment": ["student_id", "offering_id", "status"],
    "student": ["student_id", "name"],
    "employee": ["employee_id", "name"],
    "course": ["course_id", "department_id", "title"],
}


@dataclass(frozen=True)
class ImportSummary:
    accepted: int
    rejected: tuple[tuple[int, str], ...]

    def to_payload(self) -> dict:
        return {
            "accepted": self.accepted,
            "rejected": [{"line": line, "reason": reason} for line, reason in self.rejected],
        }


def _parse_int(raw: str, field: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"{field} must be an integer, got {raw!r}", field=field) from None


def _parse_enum(raw: str, enum_cls, field: str):
    try:
        return enum_cls(raw)
    except ValueError:
        raise ValidationError(f"unknown status {raw!r}", field=field) from None


def _build(kind: str, row: list[str]):
    if kind == "attendance":
        return AttendanceRecord(
            student=row[0],
            offering=row[1],
            session_index=_parse_int(row[2], "session_index"),
            status=_parse_enum(row[3], AttendanceStatus, "status"),
        )
    if kind == "enrollment":
        return Enrollment(
            student=row[0],
            offering=row[1],
            status=_parse_enum(row[2], EnrollmentStatus, "status"),
        )
    if kind == "student":
        return Student(key=row[0], name=row[1])
    if kind == "employee":
        return Employee(key=row[0], name=row[1])
    if kind == "course":
        return Course(key=row[0], department=row[1], title=row[2])
    raise AssertionError(kind)


def import_csv(store: Store, kind: str, data: bytes | str) -> ImportSummary:
    """Import one CSV file of the given kind. Raises on an unknown kind or a
    header that does not match the documented one exactly."""
    header = HEADERS.get(kind)
    if header is None:
        raise ValidationError(f"no CSV import defined for kind {kind!r}", field="kind")
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or rows[0] != header:
        raise ValidationError(
            f"malformed header: expected {','.join(header)}", field="header"
        )
    accepted = 0
    rejected: list[tuple[int, str]] = []
    for offset, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            rejected.append((offset, f"expected {len(header)} columns, got {len(row)}"))
            continue
        try:
            store.upsert(_build(kind, [cell.strip() for cell in row]))
        except ProvostError as exc:
            rejected.append((offset, exc.message))
            continue
        accepted += 1
    return ImportSummary(accepted=accepted, rejected=tuple(rejected))
