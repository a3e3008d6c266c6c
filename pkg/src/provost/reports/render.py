"""Markdown rendering of insight reports.

Pure function of the document model: title, the generated/type line, the
"About This Report" paragraph, then each section in order. Rendering twice
gives identical bytes because nothing here consults a clock or the store.
"""

from __future__ import annotations

from datetime import datetime, timezone

from provost.reports.model import InsightReport, ReportSection


def _format_timestamp(epoch: int) -> str:
    return datetime.fromtimestamp(epoch, tz=timezone.utc).strftime("%Y-%m-%d %H:%M:%S")


def _render_section(section: ReportSection) -> list[str]:
    lines = [f"## {section.heading}", ""]
    if section.kind == "rows":
        for key, value in section.rows:
            lines.append(f"- {key}: {value}")
    elif section.kind == "table":
        if section.table:
            header, *body = section.table
            lines.append("| " + " | ".join(header) + " |")
            lines.append("|" + "---|" * len(header))
            for row in body:
                lines.append("| " + " | ".join(row) + " |")
    elif section.kind == "actions":
        for number, action in enumerate(section.actions, start=1):
            lines.append(f"{number}. {action}")
    lines.append("")
    return lines


def render_markdown(report: InsightReport) -> str:
    lines = [
        f"# {report.title}",
        "",
        f"Generated: {_format_timestamp(report.generated_at)} | Type: {report.report_type.value}",
        "",
    ]
    if report.about:
        lines.extend(["## About This Report", "", report.about, ""])
    for section in report.sections:
        lines.extend(_render_section(section))
    return "\n".join(lines).rstrip("\n") + "\n"
