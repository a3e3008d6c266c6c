"""Unified academic data model and the durable store behind it."""

from provost.core.entities import (
    ENTITY_KINDS,
    AttendanceRecord,
    AttendanceStatus,
    Building,
    Classroom,
    College,
    Course,
    CourseOffering,
    Department,
    Employee,
    Enrollment,
    EnrollmentStatus,
    EntityId,
    Institution,
    Program,
    Session,
    SessionSlot,
    Student,
    Term,
)
from provost.core.store import IntegrityViolation, Store

__all__ = [
    "ENTITY_KINDS",
    "AttendanceRecord",
    "AttendanceStatus",
    "Building",
    "Classroom",
    "College",
    "Course",
    "CourseOffering",
    "Department",
    "Employee",
    "Enrollment",
    "EnrollmentStatus",
    "EntityId",
    "Institution",
    "IntegrityViolation",
    "Program",
    "Session",
    "SessionSlot",
    "Student",
    "Store",
    "Term",
]
