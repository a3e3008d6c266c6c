"""Dual-scale grade conversion: percent to letter band and 20-point value.

The band table is configuration with a validated shape: bands must
partition [0, 100] exactly, checked once at load so conversion itself can
never fail. The default table is the overridable house scale.
"""

from __future__ import annotations

from dataclasses import dataclass

from provost.canonical import round_half_up
from provost.errors import ConfigurationError, ValidationError

BOUND_TOLERANCE = 1e-9


@dataclass(frozen=True)
class GradeBand:
    letter: str
    lower: float
    upper: float  # exclusive, except for the topmost band


class GradeMapping:
    """Ordered letter bands over [0, 100]; validated on construction."""

    def __init__(self, bands: list[GradeBand]):
        if not bands:
            raise ConfigurationError("grade mapping needs at least one band")
        ordered = sorted(bands, key=lambda b: b.lower)
        if abs(ordered[0].lower) > BOUND_TOLERANCE:
            raise ConfigurationError(f"bands start at {ordered[0].lower}, expected 0")
        if abs(ordered[-1].upper - 100.0) > BOUND_TOLERANCE:
            raise ConfigurationError(f"bands end at {ordered[-1].upper}, expected 100")
        for band in ordered:
            if band.upper <= band.lower:
                raise ConfigurationError(f"band {band.letter} is empty or inverted")
        for previous, current in zip(ordered, ordered[1:]):
            if abs(previous.upper - current.lower) > BOUND_TOLERANCE:
                kind = "gap" if current.lower > previous.upper else "overlap"
                raise ConfigurationError(
                    f"{kind} between bands {previous.letter} and {current.letter}"
                )
        seen: set[str] = set()
        for band in ordered:
            if band.letter in seen:
                raise ConfigurationError(f"duplicate letter {band.letter}")
            seen.add(band.letter)
        self.bands = tuple(ordered)

    def letter_for(self, percent: float) -> str:
        for band in self.bands[:-1]:
            if band.lower <= percent < band.upper:
                return band.letter
        return self.bands[-1].letter

    def rank_of(self, letter: str) -> int:
        """Position of a letter in ascending band order; for monotonicity
        comparisons, not display."""
        for index, band in enumerate(self.bands):
            if band.letter == letter:
                return index
        raise ValidationError(f"unknown letter {letter}", field="letter")

    def to_payload(self) -> list[dict]:
        return [
            {"letter": b.letter, "lower": b.lower, "upper": b.upper} for b in self.bands
        ]

    @classmethod
    def from_payload(cls, items: list[dict]) -> "GradeMapping":
        return cls([GradeBand(i["letter"], float(i["lower"]), float(i["upper"])) for i in items])


DEFAULT_MAPPING = GradeMapping(
    [
        GradeBand("F", 0, 60),
        GradeBand("D", 60, 65),
        GradeBand("D+", 65, 70),
        GradeBand("C", 70, 75),
        GradeBand("C+", 75, 80),
        GradeBand("B", 80, 85),
        GradeBand("B+", 85, 90),
        GradeBand("A", 90, 95),
        GradeBand("A+", 95, 100),
    ]
)


@dataclass(frozen=True)
class DualGrade:
    percent: float
    letter: str
    numeric20: float

    def to_payload(self) -> dict:
        return {"percent": self.percent, "letter": self.letter, "numeric20": self.numeric20}


def convert_grade(percent: float, mapping: GradeMapping | None = None) -> DualGrade:
    """Pure conversion of one percent grade to both reporting scales.
    numeric20 is percent / 5, half-up at 2 decimals."""
    if not (0 <= percent <= 100):
        raise ValidationError(f"percent {percent} outside [0, 100]", field="percent")
    if mapping is None:
        mapping = DEFAULT_MAPPING
    return DualGrade(
        percent=percent,
        letter=mapping.letter_for(percent),
        numeric20=round_half_up(percent * 0.2, 2),
    )
