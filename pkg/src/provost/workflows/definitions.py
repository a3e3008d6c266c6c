"""Workflow definitions and their triggers.

Definitions are configuration, not store records: they load once, fail
loudly on anything malformed, and are immutable afterwards. Autonomy level
5 is rejected outright at load; levels 0..2 must pause before publishing.

Schedule grammar: `daily@HH:MM[:SS]` or `weekly@<weekday>[@HH:MM[:SS]]`.
A scheduled trigger fires at most once per period (day, or ISO week); the
caller supplies the last period already fired so evaluation stays pure.
Event triggers fire on an exact threshold crossing, and again at the
critical streak cut, never in between.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, time
from enum import Enum

from provost.errors import ConfigurationError
from provost.workflows.gating import CheckpointPolicy

_WEEKDAYS = {
    "monday": 1, "tuesday": 2, "wednesday": 3, "thursday": 4,
    "friday": 5, "saturday": 6, "sunday": 7,
}
_TIME_RE = re.compile(r"^(\d{2}):(\d{2})(?::(\d{2}))?$")

#: streak value at which the consecutive-absence event re-fires
CRITICAL_REFIRE = 5


class TriggerKind(str, Enum):
    SCHEDULED = "scheduled"
    EVENT = "event"
    ON_DEMAND = "on_demand"


def _parse_time(raw: str, context: str) -> time:
    match = _TIME_RE.match(raw)
    if match is None:
        raise ConfigurationError(f"{context}: bad time {raw!r}, expected HH:MM[:SS]")
    hour, minute, second = int(match[1]), int(match[2]), int(match[3] or 0)
    if hour > 23 or minute > 59 or second > 59:
        raise ConfigurationError(f"{context}: time {raw!r} out of range")
    return time(hour, minute, second)


@dataclass(frozen=True)
class Trigger:
    kind: TriggerKind
    # scheduled
    frequency: str | None = None  # "daily" | "weekly"
    at: time | None = None
    weekday: int | None = None  # ISO, 1 = Monday
    # event
    event_kind: str | None = None
    threshold: int | None = None

    def to_payload(self) -> dict:
        return {
            "kind": self.kind.value,
            "frequency": self.frequency,
            "at": self.at.isoformat() if self.at else None,
            "weekday": self.weekday,
            "event_kind": self.event_kind,
            "threshold": self.threshold,
        }


def parse_trigger(config: dict, workflow_id: str) -> Trigger:
    kind_raw = config.get("kind")
    try:
        kind = TriggerKind(kind_raw)
    except ValueError:
        raise ConfigurationError(f"workflow {workflow_id}: unknown trigger kind {kind_raw!r}") from None
    if kind is TriggerKind.ON_DEMAND:
        return Trigger(kind=kind)
    if kind is TriggerKind.EVENT:
        event_kind = config.get("event")
        threshold = config.get("threshold")
        if not event_kind or not isinstance(threshold, int):
            raise ConfigurationError(
                f"workflow {workflow_id}: event trigger needs an event kind and integer threshold"
            )
        return Trigger(kind=kind, event_kind=event_kind, threshold=threshold)
    schedule = config.get("schedule", "")
    parts = schedule.split("@")
    context = f"workflow {workflow_id}: schedule {schedule!r}"
    if parts[0] == "daily" and len(parts) == 2:
        return Trigger(kind=kind, frequency="daily", at=_parse_time(parts[1], context))
    if parts[0] == "weekly" and len(parts) in (2, 3):
        weekday = _WEEKDAYS.get(parts[1].lower())
        if weekday is None:
            raise ConfigurationError(f"{context}: unknown weekday {parts[1]!r}")
        at = _parse_time(parts[2], context) if len(parts) == 3 else time(0, 0, 0)
        return Trigger(kind=kind, frequency="weekly", at=at, weekday=weekday)
    raise ConfigurationError(f"{context}: expected daily@HH:MM[:SS] or weekly@<weekday>[@HH:MM[:SS]]")


@dataclass(frozen=True)
class WorkflowDefinition:
    workflow_id: str
    trigger: Trigger
    autonomy_level: int
    checkpoint_policy: CheckpointPolicy
    params: dict = field(default_factory=dict)

    def to_payload(self) -> dict:
        return {
            "workflow_id": self.workflow_id,
            "trigger": self.trigger.to_payload(),
            "autonomy_level": self.autonomy_level,
            "checkpoint_policy": self.checkpoint_policy.value,
            "params": self.params,
        }


def parse_definition(config: dict) -> WorkflowDefinition:
    workflow_id = config.get("workflow_id")
    if not workflow_id:
        raise ConfigurationError("workflow definition is missing workflow_id")
    level = config.get("autonomy_level")
    if not isinstance(level, int) or not (0 <= level <= 5):
        raise ConfigurationError(f"workflow {workflow_id}: autonomy_level must be an integer in 0..5")
    if level == 5:
        raise ConfigurationError(f"workflow {workflow_id}: level 5 not implementable")
    policy_raw = config.get("checkpoint_policy", "none")
    try:
        policy = CheckpointPolicy(policy_raw)
    except ValueError:
        raise ConfigurationError(
            f"workflow {workflow_id}: unknown checkpoint policy {policy_raw!r}"
        ) from None
    if level <= 2 and policy is CheckpointPolicy.NONE:
        raise ConfigurationError(
            f"workflow {workflow_id}: levels 0..2 require pause_before_publish or stricter"
        )
    trigger = parse_trigger(config.get("trigger", {}), workflow_id)
    return WorkflowDefinition(
        workflow_id=workflow_id,
        trigger=trigger,
        autonomy_level=level,
        checkpoint_policy=policy,
        params=dict(config.get("params", {})),
    )


def load_definitions(configs: list[dict]) -> list[WorkflowDefinition]:
    """Parse the definitions file content, preserving order (the scheduler
    executes in definition order)."""
    definitions = [parse_definition(c) for c in configs]
    seen: set[str] = set()
    for definition in definitions:
        if definition.workflow_id in seen:
            raise ConfigurationError(f"duplicate workflow id {definition.workflow_id}")
        seen.add(definition.workflow_id)
    return definitions


@dataclass(frozen=True)
class Event:
    kind: str
    value: int
    context: dict = field(default_factory=dict)


def period_key(trigger: Trigger, clock: datetime) -> str:
    """The idempotence bucket: a scheduled trigger fires once per period."""
    if trigger.frequency == "daily":
        return clock.date().isoformat()
    iso = clock.date().isocalendar()
    return f"{iso.year}-W{iso.week:02d}"


def evaluate_trigger(
    definition: WorkflowDefinition,
    clock: datetime | None = None,
    event: Event | None = None,
    last_period: str | None = None,
) -> tuple[bool, str | None]:
    """Decide whether the trigger fires. Returns (fire, period) where
    period is the idempotence key the caller must persist for scheduled
    triggers. Pure: repeated calls with the same inputs agree."""
    trigger = definition.trigger
    if trigger.kind is TriggerKind.ON_DEMAND:
        return False, None
    if trigger.kind is TriggerKind.EVENT:
        if event is None or event.kind != trigger.event_kind:
            return False, None
        fire = event.value == trigger.threshold or event.value == CRITICAL_REFIRE
        return fire, None
    if clock is None:
        return False, None
    if trigger.frequency == "weekly" and clock.isoweekday() != trigger.weekday:
        return False, None
    if clock.time() < trigger.at:
        return False, None
    period = period_key(trigger, clock)
    if period == last_period:
        return False, period
    return True, period
