"""Embedded, file-backed record store.

One directory holds the whole institutional state: `append.log` (one
canonical-JSON line per write) plus `snapshot.json` (full state, written on
demand, after which the log is truncated). Opening a store loads the
snapshot and replays the log, so a crash between writes loses nothing that
was flushed.

Concurrency contract: single writer, many readers. All mutations funnel
through one lock; reads take the same lock briefly and hand back immutable
records, so callers can share a Store across threads.

Keys are (kind, storage_key). Relationship records derive their storage key
from their natural key, which makes duplicate-key states unrepresentable;
`validate_references` therefore reports the remaining class of corruption,
dangling references, which can arise through deletes or payload edits made
outside upsert validation.
"""

from __future__ import annotations

import logging
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from provost import canonical
from provost.core.entities import ENTITY_KINDS, EntityId
from provost.core.registry import RECORD_TYPES
from provost.errors import ConflictError, IntegrityError, NotFoundError, ValidationError

logger = logging.getLogger(__name__)

_LOG_NAME = "append.log"
_SNAPSHOT_NAME = "snapshot.json"


@dataclass(frozen=True)
class RecordRef:
    """Address of any stored record; EntityId restricted to the 11 entity kinds."""

    kind: str
    key: str

    def __str__(self) -> str:
        return f"{self.kind}:{self.key}"


@dataclass(frozen=True)
class IntegrityViolation:
    kind: str
    key: str
    field: str
    message: str

    def to_payload(self) -> dict:
        return {"kind": self.kind, "key": self.key, "field": self.field, "message": self.message}


class Store:
    def __init__(self, path: str | Path | None = None):
        self._lock = threading.RLock()
        self._records: dict[str, dict[str, object]] = {}
        self._revisions: dict[tuple[str, str], int] = {}
        self._seq = 0
        self._path = Path(path) if path is not None else None
        self._log_fh = None
        if self._path is not None:
            self._path.mkdir(parents=True, exist_ok=True)
            self._load()
            self._log_fh = (self._path / _LOG_NAME).open("a", encoding="utf-8")

    # -- persistence ---------------------------------------------------------

    def _load(self) -> None:
        snapshot_path = self._path / _SNAPSHOT_NAME
        if snapshot_path.exists():
            snap = canonical.loads(snapshot_path.read_text(encoding="utf-8"))
            self._seq = snap["seq"]
            for kind, by_key in snap["records"].items():
                cls = RECORD_TYPES[kind]
                for key, envelope in by_key.items():
                    self._records.setdefault(kind, {})[key] = cls.from_payload(envelope["data"])
                    self._revisions[(kind, key)] = envelope["revision"]
        log_path = self._path / _LOG_NAME
        if log_path.exists():
            replayed = 0
            for line in log_path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                entry = canonical.loads(line)
                self._apply(entry)
                replayed += 1
            if replayed:
                logger.info("replayed %d log entries from %s", replayed, log_path)

    def _apply(self, entry: dict) -> None:
        kind, key = entry["kind"], entry["key"]
        self._seq = max(self._seq, entry["seq"])
        if entry["op"] == "put":
            cls = RECORD_TYPES[kind]
            self._records.setdefault(kind, {})[key] = cls.from_payload(entry["data"])
            self._revisions[(kind, key)] = entry["revision"]
        elif entry["op"] == "del":
            self._records.get(kind, {}).pop(key, None)
            self._revisions.pop((kind, key), None)

    def _append(self, entry: dict) -> None:
        if self._log_fh is not None:
            self._log_fh.write(canonical.dumps(entry) + "\n")
            self._log_fh.flush()

    def snapshot(self) -> None:
        """Write the full state to snapshot.json and truncate the log."""
        if self._path is None:
            return
        with self._lock:
            records = {
                kind: {
                    key: {"revision": self._revisions[(kind, key)], "data": rec.to_payload()}
                    for key, rec in by_key.items()
                }
                for kind, by_key in self._records.items()
                if by_key
            }
            payload = {"seq": self._seq, "records": records}
            tmp = self._path / (_SNAPSHOT_NAME + ".tmp")
            tmp.write_text(canonical.dumps(payload), encoding="utf-8")
            tmp.replace(self._path / _SNAPSHOT_NAME)
            if self._log_fh is not None:
                self._log_fh.close()
            self._log_fh = (self._path / _LOG_NAME).open("w", encoding="utf-8")

    def close(self) -> None:
        with self._lock:
            if self._log_fh is not None:
                self._log_fh.close()
                self._log_fh = None

    # -- writes --------------------------------------------------------------

    def upsert(self, rec) -> EntityId | RecordRef:
        kind = getattr(type(rec), "KIND", None)
        if kind is None or RECORD_TYPES.get(kind) is not type(rec):
            raise ValidationError(f"unregistered record type {type(rec).__name__}")
        errors = rec.field_errors() if hasattr(rec, "field_errors") else []
        if errors:
            field, message = errors[0]
            raise ValidationError(f"{kind}.{field}: {message}", field=field)
        with self._lock:
            for field, ref_kind, ref_key in getattr(rec, "references", list)():
                if self.get(ref_kind, ref_key) is None:
                    raise IntegrityError(
                        f"{kind}.{field} references missing {ref_kind} {ref_key}", field=field
                    )
            for hook in ("contextual_errors", "write_errors"):
                if hasattr(rec, hook):
                    ctx = getattr(rec, hook)(self.get)
                    if ctx:
                        field, message = ctx[0]
                        raise ValidationError(f"{kind}.{field}: {message}", field=field)
            previous = self._records.get(kind, {}).get(rec.storage_key())
            if previous is not None and hasattr(rec, "update_errors"):
                blocked = rec.update_errors(previous)
                if blocked:
                    field, message = blocked[0]
                    raise ConflictError(f"{kind}.{field}: {message}", field=field)
            key = rec.storage_key()
            revision = self._revisions.get((kind, key), 0) + 1
            self._seq += 1
            self._append(
                {"op": "put", "seq": self._seq, "kind": kind, "key": key,
                 "revision": revision, "data": rec.to_payload()}
            )
            self._records.setdefault(kind, {})[key] = rec
            self._revisions[(kind, key)] = revision
        if kind in ENTITY_KINDS:
            return EntityId(kind, key)
        return RecordRef(kind, key)

    def delete(self, kind: str, key: str) -> None:
        with self._lock:
            if self.get(kind, key) is None:
                raise NotFoundError(f"no {kind} with key {key}")
            self._seq += 1
            self._append({"op": "del", "seq": self._seq, "kind": kind, "key": key})
            self._records[kind].pop(key)
            self._revisions.pop((kind, key))

    # -- reads ---------------------------------------------------------------

    @contextmanager
    def locked(self):
        """Hold the writer lock across a read-then-write sequence (the lock
        is reentrant, so nested store calls stay legal)."""
        with self._lock:
            yield self

    def get(self, kind: str, key: str):
        with self._lock:
            return self._records.get(kind, {}).get(key)

    def require(self, kind: str, key: str):
        rec = self.get(kind, key)
        if rec is None:
            raise NotFoundError(f"no {kind} with key {key}")
        return rec

    def list(self, kind: str) -> list:
        with self._lock:
            by_key = self._records.get(kind, {})
            return [by_key[k] for k in sorted(by_key)]

    def revision(self, kind: str, key: str) -> int:
        with self._lock:
            rev = self._revisions.get((kind, key))
        if rev is None:
            raise NotFoundError(f"no {kind} with key {key}")
        return rev

    def exists(self, kind: str, key: str) -> bool:
        return self.get(kind, key) is not None

    # -- integrity -----------------------------------------------------------

    def validate_references(self) -> list[IntegrityViolation]:
        """Full-store scan; empty result iff every reference resolves and
        every cross-record rule still holds."""
        violations: list[IntegrityViolation] = []
        with self._lock:
            for kind in sorted(self._records):
                for key in sorted(self._records[kind]):
                    rec = self._records[kind][key]
                    for field, ref_kind, ref_key in getattr(rec, "references", list)():
                        if self.get(ref_kind, ref_key) is None:
                            violations.append(
                                IntegrityViolation(
                                    kind, key, field,
                                    f"references missing {ref_kind} {ref_key}",
                                )
                            )
                    if hasattr(rec, "contextual_errors"):
                        for field, message in rec.contextual_errors(self.get):
                            violations.append(IntegrityViolation(kind, key, field, message))
        return violations
