"""The report archive: one JSON and one markdown file per archived report.

Drafts never enter the archive. Once an id is archived its bytes are fixed:
re-putting the identical document is a no-op, anything else is rejected.
A delivery hook interface is provided for notification transports; none
ships.
"""

from __future__ import annotations

import logging
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Protocol

from provost import canonical
from provost.errors import ConflictError, NotFoundError, ValidationError
from provost.reports.model import InsightReport, ReportStatus, ReportType, serialize
from provost.reports.render import render_markdown

logger = logging.getLogger(__name__)


class DeliveryHook(Protocol):
    """Transport interface for pushing archived reports outward."""

    def deliver(self, report: InsightReport, markdown: str) -> None: ...


class Archive:
    """File-backed when given a directory, memory-backed otherwise."""

    def __init__(self, path: str | Path | None = None, hook: DeliveryHook | None = None):
        self._path = Path(path) if path is not None else None
        self._memory: dict[str, bytes] = {}
        self._hook = hook
        if self._path is not None:
            self._path.mkdir(parents=True, exist_ok=True)

    def _read(self, report_id: str) -> bytes | None:
        if self._path is not None:
            file = self._path / f"{report_id}.json"
            return file.read_bytes() if file.exists() else None
        return self._memory.get(report_id)

    def put(self, report: InsightReport) -> str:
        if report.status is ReportStatus.DRAFT:
            raise ValidationError(
                f"report {report.report_id} is a draft and cannot be archived", field="status"
            )
        data = serialize(report)
        existing = self._read(report.report_id)
        if existing is not None:
            if existing != data:
                raise ConflictError(
                    f"archive already holds different bytes for {report.report_id}"
                )
            return report.report_id
        markdown = render_markdown(report)
        if self._path is not None:
            (self._path / f"{report.report_id}.json").write_bytes(data)
            (self._path / f"{report.report_id}.md").write_text(markdown, encoding="utf-8")
        else:
            self._memory[report.report_id] = data
        if self._hook is not None:
            self._hook.deliver(report, markdown)
        logger.info("archived report %s (%s)", report.report_id, report.report_type.value)
        return report.report_id

    def get(self, report_id: str) -> InsightReport:
        data = self._read(report_id)
        if data is None:
            raise NotFoundError(f"no archived report {report_id}")
        return InsightReport.from_payload(canonical.loads(data.decode("utf-8")))

    def list(
        self,
        report_type: ReportType | None = None,
        date_from: date | None = None,
        date_to: date | None = None,
    ) -> list[InsightReport]:
        """Archived reports ordered by generated_at descending; filters are
        conjunctive, date bounds inclusive."""
        if self._path is not None:
            blobs = [f.read_bytes() for f in sorted(self._path.glob("*.json"))]
        else:
            blobs = [self._memory[k] for k in sorted(self._memory)]
        reports = [InsightReport.from_payload(canonical.loads(b.decode("utf-8"))) for b in blobs]
        if report_type is not None:
            reports = [r for r in reports if r.report_type is report_type]
        if date_from is not None or date_to is not None:
            def in_range(report: InsightReport) -> bool:
                day = datetime.fromtimestamp(report.generated_at, tz=timezone.utc).date()
                if date_from is not None and day < date_from:
                    return False
                if date_to is not None and day > date_to:
                    return False
                return True

            reports = [r for r in reports if in_range(r)]
        reports.sort(key=lambda r: (-r.generated_at, r.report_id))
        return reports
