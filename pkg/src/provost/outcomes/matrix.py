"""The CLO-PLO mapping matrix document.

Rows are the CLOs of the program's confirmed course specifications, columns
its PLOs, and a cell exists exactly where a link does, carrying the link's
contribution type and the CLO's own achievement percentage. The document is
a pure function of the store snapshot, so regenerating it without writes
yields identical canonical bytes.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from provost.canonical import round_half_up
from provost.core.store import Store
from provost.ingest.model import SpecStatus
from provost.outcomes.achievement import (
    PLO_TARGET,
    SCORE_THRESHOLD,
    TARGET_SHARE,
    course_clo_achievements,
    plo_achievement,
)
from provost.outcomes.model import links_of_program, plos_of_program


@dataclass(frozen=True)
class MatrixDocument:
    program: str
    term: str
    rows: tuple[dict, ...]
    cols: tuple[dict, ...]
    cells: tuple[dict, ...]
    rollup: tuple[dict, ...]

    def to_payload(self) -> dict:
        return {
            "program": self.program,
            "term": self.term,
            "rows": list(self.rows),
            "cols": list(self.cols),
            "cells": list(self.cells),
            "rollup": list(self.rollup),
        }


def build_matrix(
    store: Store,
    program: str,
    term: str,
    threshold: float = SCORE_THRESHOLD,
    target_share: float = TARGET_SHARE,
    plo_target: float = PLO_TARGET,
) -> MatrixDocument:
    program_rec = store.require("program", program)
    clo_stats = course_clo_achievements(store, program, term, threshold, target_share)
    links = links_of_program(store, program)
    linked = {(link.course, link.clo_id, link.plo_id): link for link in links}

    rows = []
    for course in program_rec.courses:
        spec = store.get("course_spec", course)
        if spec is None or spec.status is not SpecStatus.CONFIRMED:
            continue
        for clo in spec.clos:
            stat = clo_stats.get((course, clo.clo_id))
            rows.append(
                {
                    "course": course,
                    "clo_id": clo.clo_id,
                    "achievement_pct": stat.achievement_pct if stat else None,
                }
            )
    rows.sort(key=lambda r: (r["course"], r["clo_id"]))

    cols = [
        {"plo_id": plo.plo_id, "statement": plo.statement, "abet_criterion": plo.abet_criterion}
        for plo in plos_of_program(store, program)
    ]

    cells = []
    for (course, clo_id, plo_id), link in sorted(linked.items()):
        stat = clo_stats.get((course, clo_id))
        cells.append(
            {
                "course": course,
                "clo_id": clo_id,
                "plo_id": plo_id,
                "contribution": link.contribution.value,
                "achievement_pct": stat.achievement_pct if stat else None,
            }
        )

    rollup = [
        {
            "plo_id": stat.plo_id,
            "value": stat.value,
            "below_target": stat.below_target,
            "insufficient_evidence": stat.insufficient_evidence,
        }
        for stat in plo_achievement(
            store, program, term,
            threshold=threshold, target_share=target_share, plo_target=plo_target,
        )
    ]
    return MatrixDocument(
        program=program,
        term=term,
        rows=tuple(rows),
        cols=tuple(cols),
        cells=tuple(cells),
        rollup=tuple(rollup),
    )


def _cell_text(contribution: str, pct: float | None) -> str:
    shown = "-" if pct is None else f"{round_half_up(pct, 1):.1f}"
    return f"{contribution.upper()}:{shown}"


def matrix_csv(doc: MatrixDocument) -> str:
    """Spreadsheet rendering: one row per CLO, one column per PLO, cells
    as TYPE:pct, plus the per-PLO rollup as the final row."""
    by_pair = {(c["course"], c["clo_id"], c["plo_id"]): c for c in doc.cells}
    plo_ids = [col["plo_id"] for col in doc.cols]
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["clo"] + plo_ids)
    for row in doc.rows:
        line = [f"{row['course']}:{row['clo_id']}"]
        for plo_id in plo_ids:
            cell = by_pair.get((row["course"], row["clo_id"], plo_id))
            line.append(_cell_text(cell["contribution"], cell["achievement_pct"]) if cell else "")
        writer.writerow(line)
    rollup_line = ["rollup"]
    by_plo = {r["plo_id"]: r for r in doc.rollup}
    for plo_id in plo_ids:
        entry = by_plo.get(plo_id)
        if entry is None or entry["value"] is None:
            rollup_line.append("-")
        else:
            rollup_line.append(f"{round_half_up(entry['value'], 1):.1f}")
    writer.writerow(rollup_line)
    return buffer.getvalue()
