"""Comparative analysis between two offering groups.

A group is whatever a conjunctive filter (slot, department, course, term,
offering) selects. Metrics are computed per group in percent units so every
difference reads in points. The comparison is antisymmetric by
construction: swapping the groups swaps the labels and negates every
signed difference, nothing else.
"""

from __future__ import annotations

from dataclasses import dataclass
from statistics import fmean

from provost import canonical
from provost.core.queries import attendance_events, rate_of
from provost.core.store import Store
from provost.errors import ValidationError
from provost.grading.decisions import gradebook_rows
from provost.ingest.model import SpecStatus
from provost.outcomes.achievement import clo_achievement
from provost.reports.model import ReportSection

METRICS = ("attendance_rate", "mean_percent_grade", "clo_achievement")

COMPARATIVE_ABOUT = (
    "This report is generated by the Comparative Analysis workflow. It "
    "compares two groups of course offerings, selected by filters such as "
    "morning versus afternoon sessions or one department versus another, "
    "on attendance, grading, and outcome-achievement metrics, and states "
    "which group leads on each."
)


@dataclass(frozen=True)
class GroupFilter:
    label: str
    slot: str | None = None
    department: str | None = None
    course: str | None = None
    term: str | None = None
    offering: str | None = None

    def describe(self) -> str:
        parts = [
            f"{name}={value}"
            for name, value in (
                ("slot", self.slot),
                ("department", self.department),
                ("course", self.course),
                ("term", self.term),
                ("offering", self.offering),
            )
            if value is not None
        ]
        return ", ".join(parts) if parts else "all offerings"

    def to_payload(self) -> dict:
        return {
            "label": self.label,
            "slot": self.slot,
            "department": self.department,
            "course": self.course,
            "term": self.term,
            "offering": self.offering,
        }

    @classmethod
    def from_payload(cls, p: dict) -> "GroupFilter":
        return cls(
            label=p["label"],
            slot=p.get("slot"),
            department=p.get("department"),
            course=p.get("course"),
            term=p.get("term"),
            offering=p.get("offering"),
        )


def resolve_filter(store: Store, group: GroupFilter) -> set[str]:
    """Offering keys the filter selects; clauses are conjunctive. The slot
    clause keeps offerings whose every session sits in that slot."""
    selected: set[str] = set()
    for offering in store.list("offering"):
        if group.offering is not None and offering.key != group.offering:
            continue
        if group.course is not None and offering.course != group.course:
            continue
        if group.term is not None and offering.term != group.term:
            continue
        if group.department is not None:
            course = store.require("course", offering.course)
            if course.department != group.department:
                continue
        if group.slot is not None:
            if not offering.sessions:
                continue
            if any(s.slot.value != group.slot for s in offering.sessions):
                continue
        selected.add(offering.key)
    return selected


def _attendance_metric(store: Store, offerings: set[str]) -> float | None:
    rate = rate_of(attendance_events(store, offerings=offerings))
    return None if rate is None else 100.0 * rate


def _grade_metric(store: Store, offerings: set[str]) -> float | None:
    totals: dict[tuple[str, str], list[float]] = {}
    for row in gradebook_rows(store, offerings=offerings):
        pair = totals.setdefault((row.student, row.offering), [0.0, 0.0])
        pair[0] += row.final_points
        pair[1] += row.max_points
    pcts = [100.0 * earned / possible for earned, possible in totals.values() if possible > 0]
    return fmean(pcts) if pcts else None


def _achievement_metric(store: Store, offerings: set[str]) -> float | None:
    pcts: list[float] = []
    for key in sorted(offerings):
        offering = store.require("offering", key)
        spec = store.get("course_spec", offering.course)
        if spec is None or spec.status is not SpecStatus.CONFIRMED:
            continue
        for clo in spec.clos:
            stat = clo_achievement(store, key, clo.clo_id)
            if stat.achievement_pct is not None:
                pcts.append(stat.achievement_pct)
    return fmean(pcts) if pcts else None


_METRIC_FNS = {
    "attendance_rate": _attendance_metric,
    "mean_percent_grade": _grade_metric,
    "clo_achievement": _achievement_metric,
}


@dataclass(frozen=True)
class MetricComparison:
    metric: str
    value_a: float | None
    value_b: float | None
    difference: float | None  # value_a - value_b, in points
    interpretation: str

    def to_payload(self) -> dict:
        return {
            "metric": self.metric,
            "value_a": self.value_a,
            "value_b": self.value_b,
            "difference": self.difference,
            "interpretation": self.interpretation,
        }

    @classmethod
    def from_payload(cls, p: dict) -> "MetricComparison":
        return cls(
            metric=p["metric"],
            value_a=p["value_a"],
            value_b=p["value_b"],
            difference=p["difference"],
            interpretation=p["interpretation"],
        )


@dataclass(frozen=True)
class Comparison:
    group_a: GroupFilter
    group_b: GroupFilter
    offerings_a: tuple[str, ...]
    offerings_b: tuple[str, ...]
    rows: tuple[MetricComparison, ...]

    def to_payload(self) -> dict:
        return {
            "group_a": self.group_a.to_payload(),
            "group_b": self.group_b.to_payload(),
            "offerings_a": list(self.offerings_a),
            "offerings_b": list(self.offerings_b),
            "rows": [row.to_payload() for row in self.rows],
        }

    @classmethod
    def from_payload(cls, p: dict) -> "Comparison":
        return cls(
            group_a=GroupFilter.from_payload(p["group_a"]),
            group_b=GroupFilter.from_payload(p["group_b"]),
            offerings_a=tuple(p["offerings_a"]),
            offerings_b=tuple(p["offerings_b"]),
            rows=tuple(MetricComparison.from_payload(r) for r in p["rows"]),
        )


def _interpret(metric: str, a_label: str, b_label: str, a: float | None, b: float | None) -> str:
    if a is None or b is None:
        return f"Insufficient data to compare {metric}."
    delta = canonical.round_half_up(abs(a - b), 1)
    if delta == 0.0:
        return f"{a_label} and {b_label} are level on {metric}."
    higher, lower = (a_label, b_label) if a > b else (b_label, a_label)
    return f"{higher} leads {lower} on {metric} by {delta:.1f} points."


def compare_groups(
    store: Store,
    filter_a: GroupFilter,
    filter_b: GroupFilter,
    metrics: tuple[str, ...] = METRICS,
) -> Comparison:
    unknown = [m for m in metrics if m not in _METRIC_FNS]
    if unknown:
        raise ValidationError(f"unknown metrics {unknown}", field="metrics")
    offerings_a = resolve_filter(store, filter_a)
    offerings_b = resolve_filter(store, filter_b)
    rows = []
    for metric in metrics:
        fn = _METRIC_FNS[metric]
        a = fn(store, offerings_a) if offerings_a else None
        b = fn(store, offerings_b) if offerings_b else None
        difference = None if a is None or b is None else a - b
        rows.append(
            MetricComparison(
                metric=metric,
                value_a=a,
                value_b=b,
                difference=difference,
                interpretation=_interpret(metric, filter_a.label, filter_b.label, a, b),
            )
        )
    return Comparison(
        group_a=filter_a,
        group_b=filter_b,
        offerings_a=tuple(sorted(offerings_a)),
        offerings_b=tuple(sorted(offerings_b)),
        rows=tuple(rows),
    )


def _value_text(value: float | None) -> str:
    return "no data" if value is None else canonical.pct_display(value)


def _difference_text(difference: float | None) -> str:
    if difference is None:
        return "-"
    rounded = canonical.round_half_up(difference, 1)
    if rounded == 0.0:
        return "0.0 points"
    return f"{rounded:+.1f} points"


def comparison_sections(comparison: Comparison) -> list[ReportSection]:
    a, b = comparison.group_a, comparison.group_b
    sections = [
        ReportSection(
            heading="Groups",
            kind="rows",
            rows=(
                (a.label, f"{a.describe()} ({len(comparison.offerings_a)} offerings)"),
                (b.label, f"{b.describe()} ({len(comparison.offerings_b)} offerings)"),
            ),
        ),
        ReportSection(
            heading="Metrics",
            kind="table",
            table=(
                ("Metric", a.label, b.label, "Difference"),
                *(
                    (
                        row.metric,
                        _value_text(row.value_a),
                        _value_text(row.value_b),
                        _difference_text(row.difference),
                    )
                    for row in comparison.rows
                ),
            ),
        ),
        ReportSection(
            heading="Interpretation",
            kind="rows",
            rows=tuple((row.metric, row.interpretation) for row in comparison.rows),
        ),
    ]
    for group, offerings in ((a, comparison.offerings_a), (b, comparison.offerings_b)):
        if not offerings:
            sections.append(
                ReportSection(
                    heading="Insufficient Data",
                    kind="rows",
                    rows=((group.label, "filter matched no offerings"),),
                )
            )
    return sections
