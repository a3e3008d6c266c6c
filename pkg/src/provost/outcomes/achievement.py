"""Achievement statistics: per-student CLO scores, per-CLO shares, and the
contribution-weighted rollup to PLOs.

Two thresholds live here and they are not the same dial: the per-student
score threshold (a fraction of points, default 0.70) decides who "meets"
a CLO; the per-CLO target share (default 70%) decides whether the CLO
itself is below target. Undefined values stay None all the way through;
only below_target comparisons look at the rounded display value, so the
flag never contradicts what a reader sees on the report.
"""

from __future__ import annotations

from dataclasses import dataclass

from provost.canonical import round_half_up
from provost.core.queries import active_students
from provost.core.store import Store
from provost.grading.decisions import GradebookRow, gradebook_rows
from provost.ingest.model import SpecStatus
from provost.outcomes.model import (
    DEFAULT_WEIGHTS,
    Contribution,
    links_of_program,
    plos_of_program,
)

SCORE_THRESHOLD = 0.70
TARGET_SHARE = 0.70
PLO_TARGET = 70.0


def clo_score(rows: list[GradebookRow], student: str, clo_id: str) -> float | None:
    """Earned over maximum across every finalized question linked to the
    CLO. A question linked to k CLOs counts fully toward each; None when
    the student has no finalized linked question."""
    earned = 0.0
    possible = 0.0
    for row in rows:
        if row.student != student or clo_id not in row.clo_links:
            continue
        earned += row.final_points
        possible += row.max_points
    if possible == 0:
        return None
    return earned / possible


@dataclass(frozen=True)
class AchievementStat:
    course: str
    clo_id: str
    n_students: int
    n_meeting: int
    achievement_pct: float | None
    threshold: float
    target_share: float
    below_target: bool

    def to_payload(self) -> dict:
        return {
            "course": self.course,
            "clo_id": self.clo_id,
            "n_students": self.n_students,
            "n_meeting": self.n_meeting,
            "achievement_pct": self.achievement_pct,
            "threshold": self.threshold,
            "target_share": self.target_share,
            "below_target": self.below_target,
        }


def _share_stat(
    course: str,
    clo_id: str,
    scores: list[float],
    threshold: float,
    target_share: float,
) -> AchievementStat:
    n_students = len(scores)
    n_meeting = sum(1 for score in scores if score >= threshold)
    if n_students == 0:
        return AchievementStat(course, clo_id, 0, 0, None, threshold, target_share, False)
    pct = 100.0 * n_meeting / n_students
    below = round_half_up(pct, 1) < round_half_up(100.0 * target_share, 1)
    return AchievementStat(course, clo_id, n_students, n_meeting, pct, threshold, target_share, below)


def clo_achievement(
    store: Store,
    offering: str,
    clo_id: str,
    threshold: float = SCORE_THRESHOLD,
    target_share: float = TARGET_SHARE,
) -> AchievementStat:
    """Share of the offering's active students whose CLO score meets the
    threshold, over students with a defined score only."""
    offering_rec = store.require("offering", offering)
    rows = gradebook_rows(store, offerings={offering})
    scores = []
    for student in active_students(store, offering):
        score = clo_score(rows, student, clo_id)
        if score is not None:
            scores.append(score)
    return _share_stat(offering_rec.course, clo_id, scores, threshold, target_share)


def course_clo_achievements(
    store: Store,
    program: str,
    term: str,
    threshold: float = SCORE_THRESHOLD,
    target_share: float = TARGET_SHARE,
) -> dict[tuple[str, str], AchievementStat]:
    """Per-(course, clo) achievement across the program's offerings in one
    term. Students of parallel offerings of the same course pool into a
    single cohort before the share is taken."""
    program_rec = store.require("program", program)
    store.require("term", term)
    stats: dict[tuple[str, str], AchievementStat] = {}
    for course in program_rec.courses:
        spec = store.get("course_spec", course)
        if spec is None or spec.status is not SpecStatus.CONFIRMED:
            continue
        offerings = {
            o.key for o in store.list("offering") if o.course == course and o.term == term
        }
        rows = gradebook_rows(store, offerings=offerings)
        cohort = [
            (offering, student)
            for offering in sorted(offerings)
            for student in active_students(store, offering)
        ]
        for clo in spec.clos:
            scores = []
            for offering, student in cohort:
                score = clo_score(
                    [row for row in rows if row.offering == offering], student, clo.clo_id
                )
                if score is not None:
                    scores.append(score)
            stats[(course, clo.clo_id)] = _share_stat(
                course, clo.clo_id, scores, threshold, target_share
            )
    return stats


@dataclass(frozen=True)
class PLOStat:
    plo_id: str
    statement: str
    abet_criterion: str | None
    value: float | None
    below_target: bool
    insufficient_evidence: bool
    n_contributing: int
    target: float

    def to_payload(self) -> dict:
        return {
            "plo_id": self.plo_id,
            "statement": self.statement,
            "abet_criterion": self.abet_criterion,
            "value": self.value,
            "below_target": self.below_target,
            "insufficient_evidence": self.insufficient_evidence,
            "n_contributing": self.n_contributing,
            "target": self.target,
        }


def plo_achievement(
    store: Store,
    program: str,
    term: str,
    weights: dict[Contribution, float] | None = None,
    threshold: float = SCORE_THRESHOLD,
    target_share: float = TARGET_SHARE,
    plo_target: float = PLO_TARGET,
) -> list[PLOStat]:
    """Contribution-weighted mean of linked CLO achievements, one stat per
    PLO of the program, ordered by plo_id."""
    if weights is None:
        weights = DEFAULT_WEIGHTS
    clo_stats = course_clo_achievements(store, program, term, threshold, target_share)
    links = links_of_program(store, program)
    stats: list[PLOStat] = []
    for plo in plos_of_program(store, program):
        total = 0.0
        weight_sum = 0.0
        contributing = 0
        for link in links:
            if link.plo_id != plo.plo_id:
                continue
            stat = clo_stats.get((link.course, link.clo_id))
            if stat is None or stat.achievement_pct is None:
                continue
            weight = weights[link.contribution]
            total += weight * stat.achievement_pct
            weight_sum += weight
            contributing += 1
        if weight_sum == 0:
            stats.append(
                PLOStat(plo.plo_id, plo.statement, plo.abet_criterion,
                        None, False, True, 0, plo_target)
            )
            continue
        value = total / weight_sum
        below = round_half_up(value, 1) < plo_target
        stats.append(
            PLOStat(plo.plo_id, plo.statement, plo.abet_criterion,
                    value, below, False, contributing, plo_target)
        )
    return stats
