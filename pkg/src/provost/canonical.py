"""Canonical JSON encoding and the engine-wide rounding rules.

Every persisted or compared document goes through `dumps`: UTF-8, sorted
keys, compact separators. Byte-identical output for equal documents is a
contract several determinism tests assert, so nothing else in the codebase
may call json.dumps directly for stored artifacts.

Percentages are carried at full precision internally and rounded only for
display: half-up, one decimal. Threshold comparisons that feed displayed
flags happen on the rounded value so the flag always agrees with what a
reader sees.
"""

from __future__ import annotations

import hashlib
import json
from decimal import ROUND_HALF_UP, Decimal


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def dump_bytes(obj) -> bytes:
    return dumps(obj).encode("utf-8")


def loads(text: str | bytes):
    return json.loads(text)


def digest(obj) -> str:
    """Stable hex digest of a document, used for content-derived ids."""
    return hashlib.sha256(dump_bytes(obj)).hexdigest()


def round_half_up(value: float, ndigits: int = 1) -> float:
    # Decimal(str(x)) keeps the shortest repr, avoiding binary-float surprises
    # like round(72.75) landing on the even neighbour.
    quantum = Decimal(1).scaleb(-ndigits)
    return float(Decimal(str(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def pct_display(fraction_or_pct: float, *, is_fraction: bool = False) -> str:
    """Render a percentage for reports: half-up, one decimal, trailing %."""
    pct = fraction_or_pct * 100.0 if is_fraction else fraction_or_pct
    return f"{round_half_up(pct, 1):.1f}%"
