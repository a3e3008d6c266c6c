"""Record-type registry: the store resolves payloads back to classes by kind.

Any dataclass decorated with @record becomes storable. The contract a record
class fulfils:

    KIND: str                                   class attribute, unique
    storage_key(self) -> str                    key within the kind
    to_payload(self) -> dict                    JSON-safe primitives only
    from_payload(cls, payload) -> record        inverse of to_payload
    field_errors(self) -> list[(field, msg)]    optional, pure invariants
    references(self) -> list[(field, kind, key)]  optional, outgoing refs
    contextual_errors(self, lookup) -> list     optional, standing cross-record rules
    write_errors(self, lookup) -> list          optional, write-time preconditions
    update_errors(self, previous) -> list       optional, replacement rules

`lookup` is a callable (kind, key) -> record | None so validation never
imports the store module. contextual_errors must hold for the life of the
record (integrity audits re-check them); write_errors are enforced only at
the moment the row is written, for rules later writes may legitimately
invalidate (e.g. a withdrawal after attendance was recorded).
"""

from __future__ import annotations

RECORD_TYPES: dict[str, type] = {}


def record(cls: type) -> type:
    kind = getattr(cls, "KIND", None)
    if not kind or kind in RECORD_TYPES:
        raise RuntimeError(f"record class {cls.__name__} has a missing or duplicate KIND")
    RECORD_TYPES[kind] = cls
    return cls
