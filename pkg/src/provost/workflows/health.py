"""Daily attendance health check.

One number decides the report's shape: the institution-wide attendance
rate over the trailing window. On target, the report is a short summary.
Below target, it drills down to the departments under their target and the
courses under theirs, worst first, each with a templated recommendation.
An empty window produces a "no data" report, never an exception.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta

from provost import canonical
from provost.core.queries import attendance_events, attendance_rate, rate_of
from provost.core.store import Store
from provost.reports.model import ReportSection

DEFAULT_TARGETS = {"institution": 0.85, "department": 0.85, "course": 0.80}
DEFAULT_WINDOW_DAYS = 28

DAILY_HEALTH_ABOUT = (
    "This report is generated by the Daily Health Check workflow. It "
    "aggregates attendance across all courses and departments over the "
    "trailing four weeks, compares each level against its configured "
    "target, and drills down to the departments and courses that fall "
    "short so staff can intervene while the term is still in progress."
)


@dataclass(frozen=True)
class HealthCheck:
    as_of: date
    window_start: date
    institution_rate: float | None
    target: float
    # (key, name, rate) rows, ascending by rate; empty when on target
    departments_below: tuple[tuple[str, str, float], ...]
    courses_below: tuple[tuple[str, str, str, float], ...]  # (key, title, department, rate)

    @property
    def no_data(self) -> bool:
        return self.institution_rate is None

    @property
    def on_target(self) -> bool:
        return self.institution_rate is not None and self.institution_rate >= self.target

    def to_payload(self) -> dict:
        return {
            "as_of": self.as_of.isoformat(),
            "window_start": self.window_start.isoformat(),
            "institution_rate": self.institution_rate,
            "target": self.target,
            "departments_below": [list(row) for row in self.departments_below],
            "courses_below": [list(row) for row in self.courses_below],
        }

    @classmethod
    def from_payload(cls, p: dict) -> "HealthCheck":
        return cls(
            as_of=date.fromisoformat(p["as_of"]),
            window_start=date.fromisoformat(p["window_start"]),
            institution_rate=p["institution_rate"],
            target=p["target"],
            departments_below=tuple((k, n, r) for k, n, r in p["departments_below"]),
            courses_below=tuple((k, t, d, r) for k, t, d, r in p["courses_below"]),
        )


def _course_rate(store: Store, course: str, window: tuple[date, date]) -> float | None:
    offerings = {o.key for o in store.list("offering") if o.course == course}
    if not offerings:
        return None
    return rate_of(attendance_events(store, offerings=offerings, window=window))


def run_daily_health_check(
    store: Store,
    as_of: date,
    targets: dict | None = None,
    window_days: int = DEFAULT_WINDOW_DAYS,
) -> HealthCheck:
    targets = {**DEFAULT_TARGETS, **(targets or {})}
    window = (as_of - timedelta(days=window_days - 1), as_of)
    institution_rate = rate_of(attendance_events(store, window=window))

    departments_below: list[tuple[str, str, float]] = []
    courses_below: list[tuple[str, str, str, float]] = []
    drill_down = institution_rate is not None and institution_rate < targets["institution"]
    if drill_down:
        for dept in store.list("department"):
            rate = attendance_rate(store, "department", dept.key, window)
            if rate is not None and rate < targets["department"]:
                departments_below.append((dept.key, dept.name, rate))
        departments_below.sort(key=lambda row: (row[2], row[0]))
        flagged = {key for key, _, _ in departments_below}
        for course in store.list("course"):
            if course.department not in flagged:
                continue
            rate = _course_rate(store, course.key, window)
            if rate is not None and rate < targets["course"]:
                courses_below.append((course.key, course.title, course.department, rate))
        courses_below.sort(key=lambda row: (row[3], row[0]))

    return HealthCheck(
        as_of=as_of,
        window_start=window[0],
        institution_rate=institution_rate,
        target=targets["institution"],
        departments_below=tuple(departments_below),
        courses_below=tuple(courses_below),
    )


def _pct(value: float | None) -> str:
    return "no data" if value is None else canonical.pct_display(value, is_fraction=True)


def health_sections(check: HealthCheck) -> list[ReportSection]:
    summary_rows = [
        ("Window", f"{check.window_start.isoformat()} to {check.as_of.isoformat()}"),
        ("Institution Rate", _pct(check.institution_rate)),
        ("Target", canonical.pct_display(check.target, is_fraction=True)),
    ]
    if check.no_data:
        summary_rows.append(("Status", "no data"))
    else:
        summary_rows.append(("Standing", "on target" if check.on_target else "below target"))
    sections = [ReportSection(heading="Summary", kind="rows", rows=tuple(summary_rows))]
    if check.departments_below:
        sections.append(
            ReportSection(
                heading="Departments Below Target",
                kind="table",
                table=(
                    ("Department", "Name", "Rate"),
                    *(
                        (key, name, _pct(rate))
                        for key, name, rate in check.departments_below
                    ),
                ),
            )
        )
    if check.courses_below:
        sections.append(
            ReportSection(
                heading="Courses Below Target",
                kind="table",
                table=(
                    ("Course", "Title", "Department", "Rate"),
                    *(
                        (key, title, dept, _pct(rate))
                        for key, title, dept, rate in check.courses_below
                    ),
                ),
            )
        )
        sections.append(
            ReportSection(
                heading="Recommended Actions",
                kind="actions",
                actions=tuple(
                    f"Contact the instructor of {title} ({key}): attendance "
                    f"{_pct(rate)} is below the course target."
                    for key, title, _, rate in check.courses_below
                ),
            )
        )
    return sections
