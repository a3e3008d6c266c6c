"""The insight report document model.

A report's id is a hash of its content, so regenerating the same report
from the same data yields the same document, byte for byte. Lifecycle moves
only forward (draft, pending_approval, published) and a published report
never changes again: the store rejects any replacement that differs.

Timestamps are held as UTC epoch seconds; rendering formats them.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum

from provost import canonical
from provost.core.registry import record


class ReportType(str, Enum):
    DAILY_HEALTH = "daily_health"
    STUDENT_INSIGHT = "student_insight"
    COMPARATIVE = "comparative"
    ON_DEMAND = "on_demand"


class ReportStatus(str, Enum):
    DRAFT = "draft"
    PENDING_APPROVAL = "pending_approval"
    PUBLISHED = "published"


_STATUS_ORDER = {
    ReportStatus.DRAFT: 0,
    ReportStatus.PENDING_APPROVAL: 1,
    ReportStatus.PUBLISHED: 2,
}


@dataclass(frozen=True)
class ReportSection:
    """One report section: key-value rows, a table, or an action list."""

    heading: str
    kind: str  # "rows" | "table" | "actions"
    rows: tuple[tuple[str, str], ...] = ()
    table: tuple[tuple[str, ...], ...] = ()  # first tuple is the header
    actions: tuple[str, ...] = ()

    def to_payload(self) -> dict:
        payload: dict = {"heading": self.heading, "kind": self.kind}
        if self.kind == "rows":
            payload["rows"] = [[k, v] for k, v in self.rows]
        elif self.kind == "table":
            payload["table"] = [list(row) for row in self.table]
        elif self.kind == "actions":
            payload["actions"] = list(self.actions)
        return payload

    @classmethod
    def from_payload(cls, p: dict) -> "ReportSection":
        return cls(
            heading=p["heading"],
            kind=p["kind"],
            rows=tuple((k, v) for k, v in p.get("rows", [])),
            table=tuple(tuple(row) for row in p.get("table", [])),
            actions=tuple(p.get("actions", [])),
        )


@record
@dataclass(frozen=True)
class InsightReport:
    KIND = "report"

    report_id: str
    title: str
    report_type: ReportType
    generated_at: int  # UTC epoch seconds
    about: str
    subject: str | None
    sections: tuple[ReportSection, ...]
    status: ReportStatus

    def storage_key(self) -> str:
        return self.report_id

    def body_payload(self) -> dict:
        """Everything the id covers; status is lifecycle, not content."""
        return {
            "title": self.title,
            "report_type": self.report_type.value,
            "generated_at": self.generated_at,
            "about": self.about,
            "subject": self.subject,
            "sections": [s.to_payload() for s in self.sections],
        }

    def to_payload(self) -> dict:
        payload = self.body_payload()
        payload["report_id"] = self.report_id
        payload["status"] = self.status.value
        return payload

    @classmethod
    def from_payload(cls, p: dict) -> "InsightReport":
        return cls(
            report_id=p["report_id"],
            title=p["title"],
            report_type=ReportType(p["report_type"]),
            generated_at=int(p["generated_at"]),
            about=p["about"],
            subject=p.get("subject"),
            sections=tuple(ReportSection.from_payload(s) for s in p["sections"]),
            status=ReportStatus(p["status"]),
        )

    def field_errors(self):
        errors: list = []
        if not self.title:
            errors.append(("title", "must be non-empty"))
        if self.report_id != canonical.digest(self.body_payload())[:16]:
            errors.append(("report_id", "must be the content hash of the body"))
        for section in self.sections:
            if section.kind not in ("rows", "table", "actions"):
                errors.append(("sections", f"unknown section kind {section.kind!r}"))
        return errors

    def update_errors(self, previous: "InsightReport"):
        if previous.status is ReportStatus.PUBLISHED and self != previous:
            return [("status", f"report {self.report_id} is published and immutable")]
        if _STATUS_ORDER[self.status] < _STATUS_ORDER[previous.status]:
            return [
                ("status",
                 f"cannot move report {self.report_id} from {previous.status.value} "
                 f"back to {self.status.value}")
            ]
        return []

    def with_status(self, status: ReportStatus) -> "InsightReport":
        return InsightReport(
            report_id=self.report_id,
            title=self.title,
            report_type=self.report_type,
            generated_at=self.generated_at,
            about=self.about,
            subject=self.subject,
            sections=self.sections,
            status=status,
        )


def build_report(
    *,
    title: str,
    report_type: ReportType,
    generated_at: datetime,
    about: str,
    sections: list[ReportSection],
    subject: str | None = None,
) -> InsightReport:
    """Assemble a draft report, deriving its content-hash id."""
    if generated_at.tzinfo is None:
        generated_at = generated_at.replace(tzinfo=timezone.utc)
    epoch = int(generated_at.timestamp())
    body = {
        "title": title,
        "report_type": report_type.value,
        "generated_at": epoch,
        "about": about,
        "subject": subject,
        "sections": [s.to_payload() for s in sections],
    }
    return InsightReport(
        report_id=canonical.digest(body)[:16],
        title=title,
        report_type=report_type,
        generated_at=epoch,
        about=about,
        subject=subject,
        sections=tuple(sections),
        status=ReportStatus.DRAFT,
    )


def serialize(report: InsightReport) -> bytes:
    """Canonical JSON bytes of the full document."""
    return canonical.dump_bytes(report.to_payload())
