"""CLO/PLO achievement analytics, the mapping matrix, and compliance rules."""

from provost.outcomes.achievement import (
    AchievementStat,
    PLOStat,
    clo_achievement,
    clo_score,
    course_clo_achievements,
    plo_achievement,
)
from provost.outcomes.compliance import (
    ComplianceFinding,
    Ruleset,
    check_compliance,
    check_program_compliance,
    load_ruleset,
)
from provost.outcomes.matrix import MatrixDocument, build_matrix, matrix_csv
from provost.outcomes.model import PLO, CLOPLOLink, Contribution, DEFAULT_WEIGHTS

__all__ = [
    "AchievementStat",
    "CLOPLOLink",
    "ComplianceFinding",
    "Contribution",
    "DEFAULT_WEIGHTS",
    "MatrixDocument",
    "PLO",
    "PLOStat",
    "Ruleset",
    "build_matrix",
    "check_compliance",
    "check_program_compliance",
    "clo_achievement",
    "clo_score",
    "course_clo_achievements",
    "load_ruleset",
    "matrix_csv",
    "plo_achievement",
]
