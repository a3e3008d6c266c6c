"""The reason-act loop agents run on.

Each step is thought, action, observation, strictly in that order, and the
observation is always the literal canonical serialization of what the tool
returned (or of the error it raised, so a planner can react to failures).
Planning is pluggable behind a one-method protocol; the in-repo planners
are deterministic scripts, which keeps transcripts replayable byte for
byte. A model-backed planner would slot in here without touching the loop.

Mutating tools pass through the gate before they run. A blocked gate ends
the run as checkpoint_pending with the gate attempt itself recorded as the
final step, so no blocked run's transcript ever contains a mutating call.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Protocol, Sequence

from provost import canonical
from provost.errors import ProvostError
from provost.workflows.gating import GateDecision
from provost.workflows.toolbox import ToolContract, ToolRegistry

MAX_STEPS = 16
FINISH = "finish"

#: action name recorded when the gate blocks a mutating tool
GATE_ACTION = "gate"


class Terminal(str, Enum):
    COMPLETED = "completed"
    MAX_STEPS = "max_steps"
    CHECKPOINT_PENDING = "checkpoint_pending"
    FAILED = "failed"


@dataclass(frozen=True)
class TranscriptStep:
    thought: str
    action: tuple[str, dict]
    observation: str

    def to_payload(self) -> dict:
        return {
            "thought": self.thought,
            "action": [self.action[0], self.action[1]],
            "observation": self.observation,
        }

    @classmethod
    def from_payload(cls, p: dict) -> "TranscriptStep":
        tool, args = p["action"]
        return cls(thought=p["thought"], action=(tool, dict(args)), observation=p["observation"])


@dataclass(frozen=True)
class Transcript:
    goal: str
    steps: tuple[TranscriptStep, ...]
    terminal: Terminal

    def to_payload(self) -> dict:
        return {
            "goal": self.goal,
            "steps": [s.to_payload() for s in self.steps],
            "terminal": self.terminal.value,
        }

    @classmethod
    def from_payload(cls, p: dict) -> "Transcript":
        return cls(
            goal=p["goal"],
            steps=tuple(TranscriptStep.from_payload(s) for s in p["steps"]),
            terminal=Terminal(p["terminal"]),
        )


@dataclass(frozen=True)
class PlannerStep:
    thought: str
    tool: str
    args: dict = field(default_factory=dict)


class Planner(Protocol):
    """Returns the next step given the goal and everything observed so
    far; None means the planner has nothing left to try."""

    def next_step(self, goal: str, history: tuple[TranscriptStep, ...]) -> PlannerStep | None: ...


Gate = Callable[[ToolContract, dict], GateDecision]


def parse_observation(step: TranscriptStep) -> dict:
    return canonical.loads(step.observation)


def _error_payload(exc: Exception) -> dict:
    if isinstance(exc, ProvostError):
        return {"error": exc.to_payload()}
    return {"error": {"code": "internal", "message": repr(exc)}}


def run_react(
    goal: str,
    registry: ToolRegistry,
    planner: Planner,
    gate: Gate | None = None,
    max_steps: int = MAX_STEPS,
) -> tuple[Transcript, dict | None]:
    """Run the loop to a terminal state. The returned draft dict is the
    finish step's arguments, produced only on a completed run."""
    steps: list[TranscriptStep] = []
    terminal = Terminal.MAX_STEPS
    draft: dict | None = None
    while len(steps) < max_steps:
        planned = planner.next_step(goal, tuple(steps))
        if planned is None:
            terminal = Terminal.FAILED
            break
        if planned.tool == FINISH:
            steps.append(
                TranscriptStep(
                    thought=planned.thought,
                    action=(FINISH, planned.args),
                    observation=canonical.dumps({"finished": True}),
                )
            )
            terminal = Terminal.COMPLETED
            draft = dict(planned.args)
            break
        tool = registry.get(planned.tool)
        if tool is not None and not tool.pure and gate is not None:
            decision = gate(tool, planned.args)
            if not decision.proceed:
                approval = decision.pending.approval_id if decision.pending else None
                steps.append(
                    TranscriptStep(
                        thought=planned.thought,
                        action=(GATE_ACTION, {"tool": planned.tool, "args": planned.args}),
                        observation=canonical.dumps({"blocked": True, "approval_id": approval}),
                    )
                )
                terminal = Terminal.CHECKPOINT_PENDING
                break
        try:
            result = registry.invoke(planned.tool, planned.args)
            observation = canonical.dumps(result)
        except Exception as exc:  # recorded, the planner may retry
            observation = canonical.dumps(_error_payload(exc))
        steps.append(
            TranscriptStep(
                thought=planned.thought,
                action=(planned.tool, planned.args),
                observation=observation,
            )
        )
    return Transcript(goal=goal, steps=tuple(steps), terminal=terminal), draft


PlanEntry = PlannerStep | Callable[[re.Match, tuple[TranscriptStep, ...]], PlannerStep]


class ScriptedPlanner:
    """Deterministic planning: a goal pattern selects a fixed plan, one
    entry per step. Entries may be callables so later steps can read
    earlier observations (and the pattern's captures)."""

    def __init__(self) -> None:
        self._plans: list[tuple[re.Pattern[str], tuple[PlanEntry, ...]]] = []

    def add_plan(self, pattern: str, entries: Sequence[PlanEntry]) -> None:
        self._plans.append((re.compile(pattern), tuple(entries)))

    def next_step(self, goal: str, history: tuple[TranscriptStep, ...]) -> PlannerStep | None:
        for pattern, entries in self._plans:
            match = pattern.fullmatch(goal)
            if match is None:
                continue
            if len(history) >= len(entries):
                return None
            entry = entries[len(history)]
            return entry(match, history) if callable(entry) else entry
        return None
