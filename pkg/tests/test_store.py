"""Record store behavior: validation hooks, revisions, persistence."""

from datetime import date, datetime, timezone

import pytest

from provost.core.audit import append_audit, audit_trail
from provost.core.entities import College, Course, Department, Institution, Student, Term
from provost.core.store import Store
from provost.errors import ConflictError, IntegrityError, NotFoundError, ValidationError


def seed_chain(store):
    store.upsert(Institution("i1", "Test U"))
    store.upsert(College("k1", "i1", "Engineering"))
    store.upsert(Department("d1", "k1", "Computing"))


def test_upsert_get_require_roundtrip(store):
    seed_chain(store)
    store.upsert(Student("s1", "Ada"))
    assert store.get("student", "s1").name == "Ada"
    assert store.require("student", "s1").name == "Ada"
    assert store.exists("student", "s1")
    assert not store.exists("student", "s2")
    with pytest.raises(NotFoundError):
        store.require("student", "s2")


def test_revision_counts_writes(store):
    store.upsert(Student("s1", "Ada"))
    assert store.revision("student", "s1") == 1
    store.upsert(Student("s1", "Ada Lovelace"))
    assert store.revision("student", "s1") == 2
    assert store.get("student", "s1").name == "Ada Lovelace"
    with pytest.raises(NotFoundError):
        store.revision("student", "missing")


def test_field_errors_block_write(store):
    with pytest.raises(ValidationError) as exc:
        store.upsert(Student("", "Nameless"))
    assert exc.value.to_payload()["code"] == "validation"
    assert not store.list("student")


def test_dangling_reference_blocks_write(store):
    with pytest.raises(IntegrityError) as exc:
        store.upsert(Course("c1", "d-missing", "Intro"))
    assert "missing department" in str(exc.value)


def test_reference_satisfied_after_chain(store):
    seed_chain(store)
    ref = store.upsert(Course("c1", "d1", "Intro"))
    assert ref.kind == "course" and ref.key == "c1"


def test_list_is_sorted_by_key(store):
    for key in ("s3", "s1", "s2"):
        store.upsert(Student(key, key.upper()))
    assert [s.key for s in store.list("student")] == ["s1", "s2", "s3"]


def test_delete_removes_record(store):
    store.upsert(Student("s1", "Ada"))
    store.delete("student", "s1")
    assert store.get("student", "s1") is None
    with pytest.raises(NotFoundError):
        store.delete("student", "s1")


def test_persistence_replays_log(tmp_path):
    first = Store(tmp_path / "db")
    seed_chain(first)
    first.upsert(Student("s1", "Ada"))
    first.upsert(Student("s1", "Ada Lovelace"))
    first.close()

    second = Store(tmp_path / "db")
    assert second.get("student", "s1").name == "Ada Lovelace"
    assert second.revision("student", "s1") == 2


def test_snapshot_then_log_tail(tmp_path):
    first = Store(tmp_path / "db")
    seed_chain(first)
    first.snapshot()
    first.upsert(Student("s9", "Tail Write"))
    first.close()

    second = Store(tmp_path / "db")
    assert second.exists("department", "d1")
    assert second.get("student", "s9").name == "Tail Write"


def test_audit_rows_sequence_and_filter(store):
    at = datetime(2025, 12, 1, 8, 0, tzinfo=timezone.utc)
    append_audit(store, actor="alice", action="demo.one", subject="x", at=at)
    append_audit(store, actor="bob", action="demo.two", subject="x", at=at)
    append_audit(store, actor="alice", action="demo.one", subject="y", at=at)

    assert [e.seq for e in audit_trail(store)] == [1, 2, 3]
    assert len(audit_trail(store, actor="alice")) == 2
    assert len(audit_trail(store, subject="x", action="demo.one")) == 1


def test_term_date_order_enforced(store):
    with pytest.raises(ValidationError):
        store.upsert(Term("t1", "Backwards", date(2025, 12, 1), date(2025, 9, 1)))
