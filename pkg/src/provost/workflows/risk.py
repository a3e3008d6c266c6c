"""At-risk student detection.

classify_risk is a total function of (attendance rate, absence streak)
under a fixed rule table; everything else here assembles the evidence the
rule needs and the narrative around it: per-course breakdown, weekday/slot
absence pattern, cohort percentile, four-week trend, and the recommended
actions for the assessed tier.

The weekly batch scan and the single-student event path run the same
assessment code, so the two triggers can never disagree about a student.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta
from enum import Enum

from provost import canonical
from provost.core.entities import AttendanceStatus, EnrollmentStatus, SessionSlot
from provost.core.queries import AttendanceEvent, attendance_events, rate_of
from provost.core.store import Store
from provost.reports.model import ReportSection


class RiskLevel(str, Enum):
    SAFE = "safe"
    WATCH = "watch"
    WARNING = "warning"
    CRITICAL = "critical"


#: severity order used by the monotonicity property: safe < watch < warning < critical
LEVEL_ORDER = {
    RiskLevel.SAFE: 0,
    RiskLevel.WATCH: 1,
    RiskLevel.WARNING: 2,
    RiskLevel.CRITICAL: 3,
}


@dataclass(frozen=True)
class RiskCuts:
    """Rule-table cuts. Defaults are config-overridable, not constants of
    nature: they are chosen so 72.8% with a 3-session streak lands on
    warning and a 3-session streak alone is already warning-worthy."""

    critical_rate: float = 0.60
    warning_rate: float = 0.75
    watch_rate: float = 0.85
    warning_streak: int = 3
    critical_streak: int = 5
    course_target: float = 0.80

    @classmethod
    def from_config(cls, params: dict) -> "RiskCuts":
        return cls(**{k: v for k, v in params.items() if k in cls.__dataclass_fields__})


DEFAULT_CUTS = RiskCuts()

#: static action template keyed by tier; the warning tier is the canonical one
ACTION_TABLE: dict[RiskLevel, tuple[str, ...]] = {
    RiskLevel.SAFE: (),
    RiskLevel.WATCH: (
        "Monitor attendance over the next two weeks.",
        "Send an automated attendance reminder to the student.",
    ),
    RiskLevel.WARNING: (
        "Schedule meeting with academic advisor within 48 hours.",
        "Notify course instructors of risk status.",
        "Consider referral to student support services.",
    ),
    RiskLevel.CRITICAL: (
        "Schedule meeting with academic advisor within 24 hours.",
        "Notify course instructors and the department head immediately.",
        "Initiate a formal intervention plan with student support services.",
        "Review enrollment standing with the registrar.",
    ),
}

AT_RISK_ABOUT = (
    "This report is generated by the At-Risk Student Detection workflow. "
    "It can be triggered weekly (batch scan of all students) or in real-time "
    "when a student misses 3 consecutive sessions. The workflow analyzes the "
    "student's attendance profile, course breakdown, behavioral patterns "
    "(by day/hour), and cohort comparison to determine risk level and "
    "recommend appropriate interventions."
)

_SLOT_ORDER = {SessionSlot.MORNING.value: 0, SessionSlot.AFTERNOON.value: 1}
_WEEKDAY_ORDER = {
    name: i for i, name in enumerate(
        ("Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday")
    )
}


def classify_risk(overall_rate: float | None, streak: int, cuts: RiskCuts = DEFAULT_CUTS) -> RiskLevel:
    """Total over rate None ("no data") and any streak >= 0. The rate arm
    and the streak arm are OR-ed per tier, worst tier wins."""
    if overall_rate is None:
        # no attendance signal at all still deserves a look, never an alarm
        rate_level = RiskLevel.WATCH
    elif overall_rate < cuts.critical_rate:
        rate_level = RiskLevel.CRITICAL
    elif overall_rate < cuts.warning_rate:
        rate_level = RiskLevel.WARNING
    elif overall_rate < cuts.watch_rate:
        rate_level = RiskLevel.WATCH
    else:
        rate_level = RiskLevel.SAFE
    if streak >= cuts.critical_streak:
        streak_level = RiskLevel.CRITICAL
    elif streak >= cuts.warning_streak:
        streak_level = RiskLevel.WARNING
    else:
        streak_level = RiskLevel.SAFE
    return max(rate_level, streak_level, key=LEVEL_ORDER.__getitem__)


@dataclass(frozen=True)
class RiskAssessment:
    student: str
    as_of: date
    risk_level: RiskLevel
    overall_rate: float | None
    total_absences: int
    streak: int
    problem_courses: tuple[tuple[str, str, float], ...]  # (course, title, rate)
    peak_pattern: tuple[tuple[str, str], ...]  # (weekday, slot), schedule order
    cohort_percentile: float | None
    cohort_bucket: str | None
    trend: str  # "declining" | "stable" | "no data"
    recommended_actions: tuple[str, ...]
    no_data: bool = False

    def to_payload(self) -> dict:
        return {
            "student": self.student,
            "as_of": self.as_of.isoformat(),
            "risk_level": self.risk_level.value,
            "overall_rate": self.overall_rate,
            "total_absences": self.total_absences,
            "streak": self.streak,
            "problem_courses": [list(row) for row in self.problem_courses],
            "peak_pattern": [list(cell) for cell in self.peak_pattern],
            "cohort_percentile": self.cohort_percentile,
            "cohort_bucket": self.cohort_bucket,
            "trend": self.trend,
            "recommended_actions": list(self.recommended_actions),
            "no_data": self.no_data,
        }

    @classmethod
    def from_payload(cls, p: dict) -> "RiskAssessment":
        return cls(
            student=p["student"],
            as_of=date.fromisoformat(p["as_of"]),
            risk_level=RiskLevel(p["risk_level"]),
            overall_rate=p["overall_rate"],
            total_absences=int(p["total_absences"]),
            streak=int(p["streak"]),
            problem_courses=tuple((c, t, r) for c, t, r in p["problem_courses"]),
            peak_pattern=tuple((w, s) for w, s in p["peak_pattern"]),
            cohort_percentile=p["cohort_percentile"],
            cohort_bucket=p["cohort_bucket"],
            trend=p["trend"],
            recommended_actions=tuple(p["recommended_actions"]),
            no_data=bool(p.get("no_data", False)),
        )


def _trailing_streak(events: list[AttendanceEvent]) -> int:
    ordered = sorted(events, key=lambda e: e.session_index)
    streak = 0
    for e in ordered:
        if e.status is AttendanceStatus.ABSENT:
            streak += 1
        else:
            streak = 0
    return streak


def max_streak(store: Store, student: str, as_of: date) -> int:
    """Worst trailing absence run across the student's active offerings as
    of the given date. One course going dark is the signal; averaging
    across courses would wash it out."""
    events = [e for e in attendance_events(store, student=student) if e.date <= as_of]
    by_offering: dict[str, list[AttendanceEvent]] = {}
    for e in events:
        by_offering.setdefault(e.offering, []).append(e)
    return max((_trailing_streak(rows) for rows in by_offering.values()), default=0)


def cohort_bucket(percentile: float | None) -> str | None:
    if percentile is None:
        return None
    for cut, label in ((0.10, "Bottom 10%"), (0.20, "Bottom 20%"), (0.30, "Bottom 30%"), (0.50, "Bottom 50%")):
        if percentile <= cut:
            return label
    return "Top 50%"


def _weekly_trend(events: list[AttendanceEvent], as_of: date) -> str:
    """Sign test over the trailing four ISO weeks ending at as_of: strictly
    decreasing weekly rates read as declining."""
    weekly: list[float] = []
    iso = as_of.isocalendar()
    monday = date.fromisocalendar(iso.year, iso.week, 1)
    for back in range(3, -1, -1):
        start = monday - timedelta(weeks=back)
        end = start + timedelta(days=6)
        rate = rate_of([e for e in events if start <= e.date <= end])
        if rate is None:
            return "no data"
        weekly.append(rate)
    if all(a > b for a, b in zip(weekly, weekly[1:])):
        return "declining"
    return "stable"


def _cohort_students(store: Store) -> list[str]:
    return sorted(
        {
            e.student
            for e in store.list("enrollment")
            if e.status is EnrollmentStatus.ACTIVE
        }
    )


def assess_student(
    store: Store,
    student: str,
    as_of: date,
    cuts: RiskCuts = DEFAULT_CUTS,
    cohort_rates: dict[str, float | None] | None = None,
) -> RiskAssessment:
    """Full assessment for one student from data up to and including as_of.

    cohort_rates lets the batch path rank everyone against one shared
    computation; the single-student path recomputes the identical dict, so
    both paths agree by construction.
    """
    store.require("student", student)
    events = [e for e in attendance_events(store, student=student) if e.date <= as_of]
    overall = rate_of(events)
    total_absences = sum(1 for e in events if e.status is AttendanceStatus.ABSENT)
    streak = max_streak(store, student, as_of)
    level = classify_risk(overall, streak, cuts)

    by_course: dict[str, list[AttendanceEvent]] = {}
    for e in events:
        by_course.setdefault(e.course, []).append(e)
    problem: list[tuple[str, str, float]] = []
    for course_key, rows in by_course.items():
        rate = rate_of(rows)
        if rate is not None and rate < cuts.course_target:
            title = store.require("course", course_key).title
            problem.append((course_key, title, rate))
    problem.sort(key=lambda row: (row[2], row[0]))

    absences = [e for e in events if e.status is AttendanceStatus.ABSENT]
    by_cell: dict[tuple[str, str], int] = {}
    for e in absences:
        by_cell[(e.weekday, e.slot)] = by_cell.get((e.weekday, e.slot), 0) + 1
    peak: tuple[tuple[str, str], ...] = ()
    if by_cell:
        top = max(by_cell.values())
        peak = tuple(
            sorted(
                (cell for cell, n in by_cell.items() if n == top),
                key=lambda cell: (_WEEKDAY_ORDER[cell[0]], _SLOT_ORDER[cell[1]]),
            )
        )

    if cohort_rates is None:
        cohort_rates = {
            s: rate_of([e for e in attendance_events(store, student=s) if e.date <= as_of])
            for s in _cohort_students(store)
        }
    ranked = {s: r for s, r in cohort_rates.items() if r is not None}
    percentile = None
    if overall is not None and ranked:
        rank = sum(1 for r in ranked.values() if r <= overall)
        percentile = rank / len(ranked)

    return RiskAssessment(
        student=student,
        as_of=as_of,
        risk_level=level,
        overall_rate=overall,
        total_absences=total_absences,
        streak=streak,
        problem_courses=tuple(problem),
        peak_pattern=peak,
        cohort_percentile=percentile,
        cohort_bucket=cohort_bucket(percentile),
        trend=_weekly_trend(events, as_of),
        recommended_actions=ACTION_TABLE[level],
        no_data=overall is None,
    )


def detect_at_risk(
    store: Store,
    as_of: date,
    student: str | None = None,
    cuts: RiskCuts = DEFAULT_CUTS,
) -> list[RiskAssessment]:
    """Batch scan (student None) or single-student assessment. Both paths
    share cohort ranking inputs, so a student's assessment is identical
    whichever trigger asked for it."""
    cohort = _cohort_students(store)
    cohort_rates = {
        s: rate_of([e for e in attendance_events(store, student=s) if e.date <= as_of])
        for s in cohort
    }
    targets = cohort if student is None else [student]
    return [assess_student(store, s, as_of, cuts, cohort_rates) for s in targets]


def _percent_text(rate: float | None) -> str:
    if rate is None:
        return "no data"
    return canonical.pct_display(rate, is_fraction=True)


def _peak_text(peak: tuple[tuple[str, str], ...]) -> str:
    if not peak:
        return "none"
    return ", ".join(f"{weekday} {slot}s" for weekday, slot in peak)


def _trend_text(trend: str) -> str:
    if trend == "declining":
        return "Declining over past 4 weeks"
    if trend == "stable":
        return "Stable over past 4 weeks"
    return "Insufficient history"


def assessment_sections(assessment: RiskAssessment) -> list[ReportSection]:
    """Report body for one assessment, in the fixed four-section layout."""
    risk_rows = [("Risk Level", assessment.risk_level.value.upper())]
    if assessment.cohort_bucket is not None:
        risk_rows.append(("Cohort Percentile", assessment.cohort_bucket))
    attendance_rows = [
        ("Overall Rate", _percent_text(assessment.overall_rate)),
        ("Total Absences", str(assessment.total_absences)),
    ]
    if assessment.no_data:
        attendance_rows.append(("Status", "no data"))
    if assessment.problem_courses:
        attendance_rows.append(
            ("Problem Courses", ", ".join(title for _, title, _ in assessment.problem_courses))
        )
    return [
        ReportSection(heading="Risk Assessment", kind="rows", rows=tuple(risk_rows)),
        ReportSection(heading="Attendance Data", kind="rows", rows=tuple(attendance_rows)),
        ReportSection(
            heading="Behavioral Pattern",
            kind="rows",
            rows=(
                ("Peak Absences", _peak_text(assessment.peak_pattern)),
                ("Trend", _trend_text(assessment.trend)),
            ),
        ),
        ReportSection(
            heading="Recommended Actions",
            kind="actions",
            actions=assessment.recommended_actions,
        ),
    ]
