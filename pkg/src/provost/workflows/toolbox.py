"""The tool surface agents act through.

Each tool is a named contract: argument names, a read/write/publish kind,
and a function returning a JSON-safe dict. The ReAct loop serializes that
dict verbatim as the observation, so tools are the only boundary between
agent transcripts and the domain modules. Mutating kinds (write, publish)
are exactly the ones the autonomy gate screens.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime, timezone
from typing import Callable

from provost.core.queries import attendance_rate, enrollment_count
from provost.core.store import Store
from provost.errors import ConfigurationError, ValidationError
from provost.reports.archive import Archive
from provost.reports.model import ReportSection, ReportStatus, ReportType, build_report
from provost.workflows.compare import METRICS, GroupFilter, compare_groups
from provost.workflows.health import DEFAULT_WINDOW_DAYS, run_daily_health_check
from provost.workflows.risk import DEFAULT_CUTS, RiskCuts, assess_student, detect_at_risk

TOOL_KINDS = ("read", "write", "publish")


@dataclass(frozen=True)
class ToolContract:
    name: str
    description: str
    args: tuple[str, ...]
    kind: str
    fn: Callable[[dict], dict]

    @property
    def pure(self) -> bool:
        return self.kind == "read"


class ToolRegistry:
    def __init__(self) -> None:
        self._tools: dict[str, ToolContract] = {}

    def register(self, tool: ToolContract) -> None:
        if tool.kind not in TOOL_KINDS:
            raise ConfigurationError(f"tool {tool.name}: unknown kind {tool.kind!r}")
        if tool.name in self._tools:
            raise ConfigurationError(f"tool {tool.name} registered twice")
        self._tools[tool.name] = tool

    def get(self, name: str) -> ToolContract | None:
        return self._tools.get(name)

    def names(self) -> list[str]:
        return sorted(self._tools)

    def invoke(self, name: str, args: dict) -> dict:
        tool = self._tools.get(name)
        if tool is None:
            raise ValidationError(f"no tool named {name}", field="tool")
        unknown = sorted(set(args) - set(tool.args))
        if unknown:
            raise ValidationError(f"tool {name} does not take {unknown}", field="args")
        return tool.fn(args)


def _as_date(raw, field: str) -> date:
    if isinstance(raw, date):
        return raw
    try:
        return date.fromisoformat(raw)
    except (TypeError, ValueError):
        raise ValidationError(f"{field} must be an ISO date, got {raw!r}", field=field) from None


def standard_registry(
    store: Store,
    archive: Archive,
    cuts: RiskCuts = DEFAULT_CUTS,
    targets: dict | None = None,
    window_days: int = DEFAULT_WINDOW_DAYS,
) -> ToolRegistry:
    """The registry every shipped workflow runs against."""
    registry = ToolRegistry()

    def query_enrollment(args: dict) -> dict:
        term = args["term"]
        return {"term": term, "count": enrollment_count(store, term)}

    def query_attendance_rate(args: dict) -> dict:
        window = None
        if args.get("window_start") and args.get("window_end"):
            window = (
                _as_date(args["window_start"], "window_start"),
                _as_date(args["window_end"], "window_end"),
            )
        rate = attendance_rate(store, args["scope"], args["key"], window)
        return {"scope": args["scope"], "key": args["key"], "rate": rate}

    def assess(args: dict) -> dict:
        as_of = _as_date(args["as_of"], "as_of")
        return assess_student(store, args["student"], as_of, cuts).to_payload()

    def scan(args: dict) -> dict:
        as_of = _as_date(args["as_of"], "as_of")
        assessments = detect_at_risk(store, as_of, cuts=cuts)
        return {
            "as_of": as_of.isoformat(),
            "assessments": [a.to_payload() for a in assessments],
        }

    def health(args: dict) -> dict:
        as_of = _as_date(args["as_of"], "as_of")
        return run_daily_health_check(store, as_of, targets, window_days).to_payload()

    def compare(args: dict) -> dict:
        group_a = GroupFilter.from_payload(args["group_a"])
        group_b = GroupFilter.from_payload(args["group_b"])
        metrics = tuple(args.get("metrics") or METRICS)
        return compare_groups(store, group_a, group_b, metrics).to_payload()

    def draft(args: dict) -> dict:
        generated_at = datetime.fromtimestamp(int(args["generated_at"]), tz=timezone.utc)
        report = build_report(
            title=args["title"],
            report_type=ReportType(args["report_type"]),
            generated_at=generated_at,
            about=args["about"],
            subject=args.get("subject"),
            sections=[ReportSection.from_payload(s) for s in args["sections"]],
        )
        existing = store.get("report", report.report_id)
        if existing is None:
            store.upsert(report)
            existing = report
        # identical body hashes to the same id, so a rerun is a no-op and
        # never drags an approved report back to draft
        return {"report_id": existing.report_id, "status": existing.status.value}

    def publish(args: dict) -> dict:
        report = store.require("report", args["report_id"])
        if report.status is not ReportStatus.PUBLISHED:
            report = report.with_status(ReportStatus.PUBLISHED)
            store.upsert(report)
        archive.put(report)
        return {"report_id": report.report_id, "status": report.status.value}

    for tool in (
        ToolContract(
            "query_enrollment", "active enrollment count for a term", ("term",), "read",
            query_enrollment,
        ),
        ToolContract(
            "query_attendance_rate",
            "attendance rate for a student, offering, department, or institution",
            ("scope", "key", "window_start", "window_end"), "read", query_attendance_rate,
        ),
        ToolContract(
            "assess_student", "full at-risk assessment for one student",
            ("student", "as_of"), "read", assess,
        ),
        ToolContract(
            "scan_at_risk", "at-risk assessment of every active student",
            ("as_of",), "read", scan,
        ),
        ToolContract(
            "health_scan", "institution attendance health with drill-down",
            ("as_of",), "read", health,
        ),
        ToolContract(
            "compare_groups", "metric comparison between two offering groups",
            ("group_a", "group_b", "metrics"), "read", compare,
        ),
        ToolContract(
            "draft_report", "assemble and store a draft insight report",
            ("title", "report_type", "about", "subject", "sections", "generated_at"),
            "write", draft,
        ),
        ToolContract(
            "publish_report", "publish a stored report and archive it",
            ("report_id",), "publish", publish,
        ),
    ):
        registry.register(tool)
    return registry
