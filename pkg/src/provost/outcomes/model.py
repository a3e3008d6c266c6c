"""Program learning outcomes and their links to course CLOs."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from provost.core.registry import record
from provost.ingest.model import SpecStatus


class Contribution(str, Enum):
    DIRECT = "direct"
    SUPPORTING = "supporting"
    INDIRECT = "indirect"


#: default aggregation weights; configuration, not doctrine
DEFAULT_WEIGHTS: dict[Contribution, float] = {
    Contribution.DIRECT: 1.0,
    Contribution.SUPPORTING: 0.5,
    Contribution.INDIRECT: 0.25,
}


@record
@dataclass(frozen=True)
class PLO:
    KIND = "plo"

    program: str
    plo_id: str
    statement: str
    abet_criterion: str | None = None

    def storage_key(self) -> str:
        return f"{self.program}~{self.plo_id}"

    def to_payload(self) -> dict:
        return {
            "program": self.program,
            "plo_id": self.plo_id,
            "statement": self.statement,
            "abet_criterion": self.abet_criterion,
        }

    @classmethod
    def from_payload(cls, p: dict) -> "PLO":
        return cls(
            program=p["program"],
            plo_id=p["plo_id"],
            statement=p["statement"],
            abet_criterion=p.get("abet_criterion"),
        )

    def field_errors(self):
        errors: list = []
        if not self.plo_id:
            errors.append(("plo_id", "must be non-empty"))
        if not self.statement:
            errors.append(("statement", "must be non-empty"))
        return errors

    def references(self):
        return [("program", "program", self.program)]


@record
@dataclass(frozen=True)
class CLOPLOLink:
    """One (course CLO) -> (program PLO) edge. The storage key covers the
    full pair, so a second link for the same pair replaces the first rather
    than duplicating it."""

    KIND = "clo_plo_link"

    program: str
    course: str
    clo_id: str
    plo_id: str
    contribution: Contribution

    def storage_key(self) -> str:
        return f"{self.program}~{self.course}~{self.clo_id}~{self.plo_id}"

    def to_payload(self) -> dict:
        return {
            "program": self.program,
            "course": self.course,
            "clo_id": self.clo_id,
            "plo_id": self.plo_id,
            "contribution": self.contribution.value,
        }

    @classmethod
    def from_payload(cls, p: dict) -> "CLOPLOLink":
        return cls(
            program=p["program"],
            course=p["course"],
            clo_id=p["clo_id"],
            plo_id=p["plo_id"],
            contribution=Contribution(p["contribution"]),
        )

    def references(self):
        return [
            ("program", "program", self.program),
            ("course", "course", self.course),
            ("plo_id", "plo", f"{self.program}~{self.plo_id}"),
        ]

    def write_errors(self, lookup):
        errors: list = []
        program = lookup("program", self.program)
        if program is not None and self.course not in program.courses:
            errors.append(("course", f"course {self.course} is not in program {self.program}"))
        spec = lookup("course_spec", self.course)
        if spec is None or spec.status is not SpecStatus.CONFIRMED:
            errors.append(("clo_id", f"course {self.course} has no confirmed specification"))
        elif spec.clo_by_id(self.clo_id) is None:
            errors.append(("clo_id", f"{self.clo_id} not in specification of course {self.course}"))
        return errors


def links_of_program(store, program: str) -> list[CLOPLOLink]:
    return [link for link in store.list("clo_plo_link") if link.program == program]


def plos_of_program(store, program: str) -> list[PLO]:
    return sorted(
        (plo for plo in store.list("plo") if plo.program == program),
        key=lambda plo: plo.plo_id,
    )
