"""Insight report documents, their rendering, and the archive."""

from provost.reports.archive import Archive, DeliveryHook
from provost.reports.model import (
    InsightReport,
    ReportSection,
    ReportStatus,
    ReportType,
    build_report,
    serialize,
)
from provost.reports.render import render_markdown

__all__ = [
    "Archive",
    "DeliveryHook",
    "InsightReport",
    "ReportSection",
    "ReportStatus",
    "ReportType",
    "build_report",
    "render_markdown",
    "serialize",
]
