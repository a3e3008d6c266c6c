"""Syllabus extraction and the confirm flow."""

import pytest

from provost.core.entities import College, Course, Department, Employee, Institution
from provost.errors import AdapterError, IntegrityError, NotFoundError, ValidationError
from provost.ingest.extractor import extract_specification
from provost.ingest.model import BloomLevel, SpecStatus
from provost.ingest.review import confirm_draft, load_draft, store_draft, validate_draft

FULL_DOC = """\
COURSE: c1
CLO c1.1 [remember]: State the definitions.
CLO c1.2: Apply the definitions.
TOPIC: Definitions
TOPIC: Applications
ASSESS: Final exam, 0.6
ASSESS: Homework, 0.4
BOOK: The Definitions Book
"""


def seed_reviewer(store):
    store.upsert(Institution("i1", "Test U"))
    store.upsert(College("k1", "i1", "Engineering"))
    store.upsert(Department("d1", "k1", "Computing"))
    store.upsert(Course("c1", "d1", "Intro"))
    store.upsert(Employee("rev", "Reviewer"))


def test_full_grammar_extraction():
    draft = extract_specification(FULL_DOC)
    assert draft.course == "c1"
    assert [c.clo_id for c in draft.clos] == ["c1.1", "c1.2"]
    assert draft.clos[0].bloom_level is BloomLevel.REMEMBER
    assert draft.clos[1].bloom_level is None
    assert draft.topics == ("Definitions", "Applications")
    assert draft.assessment_methods == (("Final exam", 0.6), ("Homework", 0.4))
    assert draft.textbooks == ("The Definitions Book",)
    assert draft.confidence == {
        "course": 1.0, "clos": 1.0, "topics": 1.0,
        "assessment_methods": 1.0, "textbooks": 1.0,
    }
    assert draft.spans["clos"] == (2, 3)


def test_same_document_same_draft_id():
    assert extract_specification(FULL_DOC).draft_id == extract_specification(FULL_DOC).draft_id
    assert (
        extract_specification(FULL_DOC).draft_id
        != extract_specification(FULL_DOC + "TOPIC: One more\n").draft_id
    )


def test_extraction_warnings():
    doc = """\
COURSE: c1
COURSE: c2
CLO c1.1 [transcend]: Beyond the taxonomy.
CLO c1.1: Same id again.
what is this line
ASSESS: Final exam and nothing else
"""
    draft = extract_specification(doc)
    assert draft.course == "c1"
    assert len(draft.clos) == 1 and draft.clos[0].bloom_level is None
    fields = [w.field for w in draft.warnings]
    assert fields.count("clos") >= 2  # unknown bloom + duplicate id
    assert "course" in fields
    assert "document" in fields
    assert "assessment_methods" in fields


def test_empty_document_rejected():
    with pytest.raises(ValidationError):
        extract_specification("   \n \n")


def test_adapter_crash_is_adapter_error():
    class Broken:
        adapter_id = "broken"

        def extract(self, text):
            raise RuntimeError("boom")

    with pytest.raises(AdapterError):
        extract_specification("COURSE: c1\n", adapter=Broken())


def test_validate_draft_blocks_and_warns():
    draft = extract_specification("CLO x [apply]: Statement.\nASSESS: Final, 0.7\n")
    findings = validate_draft(draft)
    errors = {f.field for f in findings if f.severity == "error"}
    assert errors == {"course", "assessment_methods"}
    warns = {f.field for f in findings if f.severity == "warn"}
    assert "topics" in warns and "textbooks" in warns


def test_store_load_confirm_round_trip(store):
    seed_reviewer(store)
    draft = extract_specification(FULL_DOC)
    draft_id = store_draft(store, draft)
    loaded = load_draft(store, draft_id)
    assert loaded == draft

    spec = confirm_draft(store, loaded, reviewer="rev")
    assert spec.status is SpecStatus.CONFIRMED
    assert store.get("course_spec", "c1") == spec
    # the confirmation left an audit row naming the reviewer
    trail = [e for e in store.list("audit") if e.action == "ingest.confirm"]
    assert len(trail) == 1 and trail[0].actor == "rev"


def test_confirm_requires_known_reviewer(store):
    seed_reviewer(store)
    draft = extract_specification(FULL_DOC)
    with pytest.raises(IntegrityError):
        confirm_draft(store, draft, reviewer="ghost")


def test_confirm_blocks_on_error_findings(store):
    seed_reviewer(store)
    draft = extract_specification("CLO c1.1 [apply]: Fine statement.\n")
    store_draft(store, draft)
    with pytest.raises(ValidationError) as exc:
        confirm_draft(store, draft, reviewer="rev")
    assert "blocking findings" in str(exc.value)


def test_load_draft_missing(store):
    with pytest.raises(NotFoundError):
        load_draft(store, "nope")
