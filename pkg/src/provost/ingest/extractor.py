"""Deterministic grammar extractor over the plain-text syllabus format.

The format is line-oriented, one directive per line:

    COURSE: <key>
    CLO <id> [<bloom>]: <statement>      bracketed bloom level optional
    TOPIC: <text>
    ASSESS: <name>, <weight>             weight is a fraction of the total
    BOOK: <text>

Blank lines are ignored; anything else draws a warning. The extractor is a
pure function of the input text, so the same document always produces the
same draft, byte for byte. Model-backed extractors plug in through the same
adapter surface but are deliberately not exercised by the test suite.
"""

from __future__ import annotations

import logging
import re
from typing import Protocol

from provost.errors import AdapterError, ValidationError
from provost.ingest.model import CLO, BloomLevel, DraftSpecification, Finding

logger = logging.getLogger(__name__)

_CLO_LINE = re.compile(r"^CLO\s+(\S+?)(?:\s+\[([a-z]+)\])?\s*:\s*(\S.*)$")
_DIRECTIVE = re.compile(r"^(COURSE|TOPIC|ASSESS|BOOK)\s*:\s*(\S.*)$")

_FIELDS = ("course", "clos", "topics", "assessment_methods", "textbooks")


class ExtractorAdapter(Protocol):
    adapter_id: str

    def extract(self, document_text: str) -> DraftSpecification: ...


class GrammarExtractor:
    """The in-repo extractor: deterministic, confidence 1.0 for any field
    the grammar matched and 0.0 for any it did not."""

    adapter_id = "grammar"

    def extract(self, document_text: str) -> DraftSpecification:
        course: str | None = None
        clos: list[CLO] = []
        topics: list[str] = []
        methods: list[tuple[str, float]] = []
        books: list[str] = []
        warnings: list[Finding] = []
        spans: dict[str, list[int]] = {}
        seen_clo_ids: set[str] = set()

        def mark(field: str, line_no: int) -> None:
            span = spans.setdefault(field, [line_no, line_no])
            span[1] = line_no

        for line_no, raw in enumerate(document_text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            clo_match = _CLO_LINE.match(line)
            if clo_match:
                clo_id, bloom_raw, statement = clo_match.groups()
                if clo_id in seen_clo_ids:
                    warnings.append(
                        Finding("warn", "clos", f"line {line_no}: duplicate CLO id {clo_id}, keeping first")
                    )
                    continue
                bloom: BloomLevel | None = None
                if bloom_raw is not None:
                    try:
                        bloom = BloomLevel(bloom_raw)
                    except ValueError:
                        warnings.append(
                            Finding("warn", "clos", f"line {line_no}: unknown bloom level {bloom_raw!r}")
                        )
                seen_clo_ids.add(clo_id)
                clos.append(CLO(clo_id=clo_id, statement=statement, bloom_level=bloom))
                mark("clos", line_no)
                continue
            directive = _DIRECTIVE.match(line)
            if directive is None:
                warnings.append(Finding("warn", "document", f"line {line_no}: unrecognized line"))
                continue
            keyword, rest = directive.groups()
            if keyword == "COURSE":
                if course is not None:
                    warnings.append(
                        Finding("warn", "course", f"line {line_no}: duplicate COURSE line, keeping first")
                    )
                    continue
                course = rest
                mark("course", line_no)
            elif keyword == "TOPIC":
                topics.append(rest)
                mark("topics", line_no)
            elif keyword == "BOOK":
                books.append(rest)
                mark("textbooks", line_no)
            elif keyword == "ASSESS":
                name, sep, weight_raw = rest.rpartition(",")
                try:
                    if not sep:
                        raise ValueError
                    weight = float(weight_raw.strip())
                except ValueError:
                    warnings.append(
                        Finding("warn", "assessment_methods", f"line {line_no}: unparseable ASSESS line")
                    )
                    continue
                methods.append((name.strip(), weight))
                mark("assessment_methods", line_no)

        if not clos:
            warnings.append(Finding("warn", "clos", "no CLO lines found"))
        if not topics:
            warnings.append(Finding("warn", "topics", "no TOPIC lines found"))

        populated = {
            "course": course is not None,
            "clos": bool(clos),
            "topics": bool(topics),
            "assessment_methods": bool(methods),
            "textbooks": bool(books),
        }
        return DraftSpecification(
            course=course,
            clos=tuple(clos),
            topics=tuple(topics),
            assessment_methods=tuple(methods),
            textbooks=tuple(books),
            confidence={f: 1.0 if populated[f] else 0.0 for f in _FIELDS},
            spans={f: tuple(s) for f, s in spans.items()},
            warnings=tuple(warnings),
        )


def extract_specification(
    document_text: str, adapter: ExtractorAdapter | None = None
) -> DraftSpecification:
    """Run one extractor over one document. Content problems become
    warnings on the draft; only an adapter crash raises."""
    if not document_text or not document_text.strip():
        raise ValidationError("document text is empty", field="document_text")
    if adapter is None:
        adapter = GrammarExtractor()
    try:
        draft = adapter.extract(document_text)
    except Exception as exc:
        raise AdapterError(
            f"extractor {adapter.adapter_id!r} failed: {exc}", adapter_id=adapter.adapter_id
        ) from exc
    logger.info(
        "extracted draft %s: %d clos, %d warnings", draft.draft_id, len(draft.clos), len(draft.warnings)
    )
    return draft
