"""Course specification types: the draft side and the confirmed side.

A draft is whatever extraction produced, faults and all; it is storable so
review can happen in a later process, and its identity is a content hash,
so the same document always yields the same draft id. A confirmed
specification is the reviewed artifact the rest of the system trusts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

from provost import canonical
from provost.core.registry import record

WEIGHT_TOLERANCE = 1e-9


class BloomLevel(str, Enum):
    REMEMBER = "remember"
    UNDERSTAND = "understand"
    APPLY = "apply"
    ANALYZE = "analyze"
    EVALUATE = "evaluate"
    CREATE = "create"


class SpecStatus(str, Enum):
    DRAFT = "draft"
    CONFIRMED = "confirmed"


@dataclass(frozen=True)
class CLO:
    clo_id: str
    statement: str
    bloom_level: BloomLevel | None = None

    def to_payload(self) -> dict:
        return {
            "clo_id": self.clo_id,
            "statement": self.statement,
            "bloom_level": self.bloom_level.value if self.bloom_level else None,
        }

    @classmethod
    def from_payload(cls, p: dict) -> "CLO":
        bloom = p.get("bloom_level")
        return cls(
            clo_id=p["clo_id"],
            statement=p["statement"],
            bloom_level=BloomLevel(bloom) if bloom else None,
        )


@dataclass(frozen=True)
class Finding:
    severity: str  # "warn" | "error"
    field: str
    message: str

    def to_payload(self) -> dict:
        return {"severity": self.severity, "field": self.field, "message": self.message}

    @classmethod
    def from_payload(cls, p: dict) -> "Finding":
        return cls(severity=p["severity"], field=p["field"], message=p["message"])


def _methods_payload(methods) -> list[dict]:
    return [{"name": name, "weight": weight} for name, weight in methods]


def _methods_from_payload(items) -> tuple[tuple[str, float], ...]:
    return tuple((m["name"], float(m["weight"])) for m in items)


@record
@dataclass(frozen=True)
class DraftSpecification:
    """Extraction output. `spans` maps each populated field to its 1-based
    (first, last) source line range; `confidence` carries the adapter's
    per-field score; `warnings` are extraction-time findings."""

    KIND = "draft_spec"

    course: str | None
    clos: tuple[CLO, ...] = ()
    topics: tuple[str, ...] = ()
    assessment_methods: tuple[tuple[str, float], ...] = ()
    textbooks: tuple[str, ...] = ()
    confidence: dict = field(default_factory=dict)
    spans: dict = field(default_factory=dict)
    warnings: tuple[Finding, ...] = ()

    @cached_property
    def draft_id(self) -> str:
        return canonical.digest(self._body_payload())[:16]

    def _body_payload(self) -> dict:
        return {
            "course": self.course,
            "clos": [c.to_payload() for c in self.clos],
            "topics": list(self.topics),
            "assessment_methods": _methods_payload(self.assessment_methods),
            "textbooks": list(self.textbooks),
            "confidence": dict(self.confidence),
            "spans": {k: list(v) for k, v in self.spans.items()},
            "warnings": [w.to_payload() for w in self.warnings],
        }

    def storage_key(self) -> str:
        return self.draft_id

    def to_payload(self) -> dict:
        payload = self._body_payload()
        payload["draft_id"] = self.draft_id
        return payload

    @classmethod
    def from_payload(cls, p: dict) -> "DraftSpecification":
        return cls(
            course=p.get("course"),
            clos=tuple(CLO.from_payload(c) for c in p["clos"]),
            topics=tuple(p["topics"]),
            assessment_methods=_methods_from_payload(p["assessment_methods"]),
            textbooks=tuple(p["textbooks"]),
            confidence=dict(p["confidence"]),
            spans={k: tuple(v) for k, v in p["spans"].items()},
            warnings=tuple(Finding.from_payload(w) for w in p["warnings"]),
        )


@record
@dataclass(frozen=True)
class CourseSpecification:
    KIND = "course_spec"

    course: str
    clos: tuple[CLO, ...]
    topics: tuple[str, ...]
    assessment_methods: tuple[tuple[str, float], ...]
    textbooks: tuple[str, ...]
    status: SpecStatus

    def storage_key(self) -> str:
        return self.course

    def to_payload(self) -> dict:
        return {
            "course": self.course,
            "clos": [c.to_payload() for c in self.clos],
            "topics": list(self.topics),
            "assessment_methods": _methods_payload(self.assessment_methods),
            "textbooks": list(self.textbooks),
            "status": self.status.value,
        }

    @classmethod
    def from_payload(cls, p: dict) -> "CourseSpecification":
        return cls(
            course=p["course"],
            clos=tuple(CLO.from_payload(c) for c in p["clos"]),
            topics=tuple(p["topics"]),
            assessment_methods=_methods_from_payload(p["assessment_methods"]),
            textbooks=tuple(p["textbooks"]),
            status=SpecStatus(p["status"]),
        )

    def field_errors(self):
        errors: list = []
        if self.assessment_methods:
            total = sum(weight for _, weight in self.assessment_methods)
            if abs(total - 1.0) > WEIGHT_TOLERANCE:
                errors.append(("assessment_methods", f"weights sum to {total}, expected 1.0"))
        if self.status is SpecStatus.CONFIRMED and not self.clos:
            errors.append(("clos", "a confirmed specification requires at least one CLO"))
        seen: set[str] = set()
        for clo in self.clos:
            if not clo.statement:
                errors.append(("clos", f"CLO {clo.clo_id} has an empty statement"))
            if clo.clo_id in seen:
                errors.append(("clos", f"duplicate CLO id {clo.clo_id}"))
            seen.add(clo.clo_id)
        return errors

    def references(self):
        return [("course", "course", self.course)]

    def clo_by_id(self, clo_id: str) -> CLO | None:
        for clo in self.clos:
            if clo.clo_id == clo_id:
                return clo
        return None
