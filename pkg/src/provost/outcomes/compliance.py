"""Accreditation compliance rules.

Five built-in rules, each with a stable id, a severity, and a templated
remediation string. The ruleset is configuration: callers may disable
rules or adjust parameters, but naming an unknown rule fails at load, not
mid-audit.

    R1  specification has at least one CLO
    R2  every CLO carries a bloom level
    R3  every CLO maps to at least one PLO
    R4  every PLO is covered by a direct link from some course
    R5  assessment weights sum to 1
"""

from __future__ import annotations

from dataclasses import dataclass, field

from provost.core.store import Store
from provost.errors import ConfigurationError
from provost.ingest.model import WEIGHT_TOLERANCE, CourseSpecification, SpecStatus
from provost.outcomes.model import CLOPLOLink, Contribution, links_of_program, plos_of_program

RULE_IDS = ("R1", "R2", "R3", "R4", "R5")


@dataclass(frozen=True)
class ComplianceFinding:
    rule: str
    severity: str  # "warn" | "error"
    subject: str
    message: str
    remediation: str

    def to_payload(self) -> dict:
        return {
            "rule": self.rule,
            "severity": self.severity,
            "subject": self.subject,
            "message": self.message,
            "remediation": self.remediation,
        }


@dataclass(frozen=True)
class Ruleset:
    enabled: tuple[str, ...] = RULE_IDS
    params: dict = field(default_factory=dict)

    def has(self, rule: str) -> bool:
        return rule in self.enabled


DEFAULT_RULESET = Ruleset()


def load_ruleset(config: dict) -> Ruleset:
    """Build a ruleset from parsed config ({"enabled": [...], "params": {...}})."""
    enabled = tuple(config.get("enabled", RULE_IDS))
    for rule in enabled:
        if rule not in RULE_IDS:
            raise ConfigurationError(f"unknown compliance rule {rule!r}")
    params = dict(config.get("params", {}))
    for rule in params:
        if rule not in RULE_IDS:
            raise ConfigurationError(f"parameters given for unknown rule {rule!r}")
    return Ruleset(enabled=enabled, params=params)


def _r4_findings(links: list[CLOPLOLink], plos: list) -> list[ComplianceFinding]:
    directly_covered = {
        link.plo_id for link in links if link.contribution is Contribution.DIRECT
    }
    return [
        ComplianceFinding(
            "R4", "error", f"plo:{plo.plo_id}",
            f"PLO {plo.plo_id} has no direct CLO link from any course",
            f"Add a direct-contribution link from some course CLO to {plo.plo_id}.",
        )
        for plo in plos
        if plo.plo_id not in directly_covered
    ]


def check_compliance(
    spec: CourseSpecification,
    links: list[CLOPLOLink],
    ruleset: Ruleset | None = None,
    plos: list | None = None,
) -> list[ComplianceFinding]:
    """Audit one course specification against the enabled rules. R4 is a
    program-level rule and only runs when the program's PLOs are passed in;
    per-course callers get R1/R2/R3/R5."""
    if ruleset is None:
        ruleset = DEFAULT_RULESET
    findings: list[ComplianceFinding] = []
    course = spec.course

    if ruleset.has("R1") and not spec.clos:
        findings.append(
            ComplianceFinding(
                "R1", "error", f"course:{course}",
                f"specification of {course} defines no CLOs",
                f"Add at least one CLO to the specification of {course} and reconfirm it.",
            )
        )
    if ruleset.has("R2"):
        for clo in spec.clos:
            if clo.bloom_level is None:
                findings.append(
                    ComplianceFinding(
                        "R2", "warn", f"clo:{course}.{clo.clo_id}",
                        f"CLO {clo.clo_id} of {course} has no bloom level",
                        f"Assign a bloom taxonomy level to CLO {clo.clo_id}.",
                    )
                )
    if ruleset.has("R3"):
        mapped = {link.clo_id for link in links if link.course == course}
        for clo in spec.clos:
            if clo.clo_id not in mapped:
                findings.append(
                    ComplianceFinding(
                        "R3", "error", f"clo:{course}.{clo.clo_id}",
                        f"CLO {clo.clo_id} of {course} maps to no PLO",
                        f"Link CLO {clo.clo_id} to at least one PLO of the program.",
                    )
                )
    if ruleset.has("R4") and plos is not None:
        findings.extend(_r4_findings(links, plos))
    if ruleset.has("R5") and spec.assessment_methods:
        total = sum(weight for _, weight in spec.assessment_methods)
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            findings.append(
                ComplianceFinding(
                    "R5", "error", f"course:{course}",
                    f"assessment weights of {course} sum to {total:g}",
                    f"Adjust the assessment weights of {course} to total exactly 1.0.",
                )
            )
    return findings


def check_program_compliance(
    store: Store,
    program: str,
    ruleset: Ruleset | None = None,
) -> list[ComplianceFinding]:
    """Run the per-course rules over every confirmed specification in the
    program's curriculum, plus the program-wide R4, in one deterministic
    pass."""
    if ruleset is None:
        ruleset = DEFAULT_RULESET
    program_rec = store.require("program", program)
    links = links_of_program(store, program)
    plos = plos_of_program(store, program)
    findings: list[ComplianceFinding] = []
    for course in program_rec.courses:
        spec = store.get("course_spec", course)
        if spec is None or spec.status is not SpecStatus.CONFIRMED:
            findings.append(
                ComplianceFinding(
                    "R1", "error", f"course:{course}",
                    f"course {course} has no confirmed specification",
                    f"Ingest and confirm a specification for {course}.",
                )
            )
            continue
        findings.extend(check_compliance(spec, links, ruleset, plos=None))
    if ruleset.has("R4"):
        findings.extend(_r4_findings(links, plos))
    return findings
