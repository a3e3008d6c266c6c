"""The workflow engine: shipped definitions, their planners, scheduling,
and the human approval loop.

Three workflows ship. The daily health check runs scheduled at level 3
with pause_before_publish, so its report always waits for a human. The
at-risk detection runs weekly (and again on the consecutive-absence event)
at level 4: it publishes on its own, leaving an override audit row. The
comparative analysis is on demand at level 3 with no pause.

Every run is a ReAct loop over the standard tool registry, executed with a
clock derived from (as_of, schedule time) rather than the wall clock, so a
rerun against the same data reproduces the same reports byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime, time, timezone
from enum import Enum

from provost.core.audit import SYSTEM_ACTOR
from provost.core.registry import record
from provost.core.store import Store
from provost.errors import ConfigurationError, NotFoundError
from provost.reports.archive import Archive
from provost.reports.model import InsightReport, ReportStatus
from provost.workflows.compare import (
    COMPARATIVE_ABOUT,
    Comparison,
    GroupFilter,
    comparison_sections,
)
from provost.workflows.definitions import (
    Event,
    TriggerKind,
    WorkflowDefinition,
    evaluate_trigger,
    load_definitions,
)
from provost.workflows.gating import (
    PendingApproval,
    decide_approval,
    gate_checkpoint,
    pending_approvals,
)
from provost.workflows.health import (
    DAILY_HEALTH_ABOUT,
    DEFAULT_WINDOW_DAYS,
    HealthCheck,
    health_sections,
)
from provost.workflows.react import (
    FINISH,
    GATE_ACTION,
    MAX_STEPS,
    PlannerStep,
    Transcript,
    TranscriptStep,
    parse_observation,
    run_react,
)
from provost.workflows.risk import (
    AT_RISK_ABOUT,
    DEFAULT_CUTS,
    RiskAssessment,
    RiskCuts,
    assessment_sections,
)
from provost.workflows.toolbox import standard_registry

#: the definitions the engine loads when given no config
DEFAULT_WORKFLOWS: list[dict] = [
    {
        "workflow_id": "daily_health",
        "trigger": {"kind": "scheduled", "schedule": "daily@06:00:00"},
        "autonomy_level": 3,
        "checkpoint_policy": "pause_before_publish",
    },
    {
        "workflow_id": "at_risk",
        "trigger": {"kind": "scheduled", "schedule": "weekly@saturday@05:23:02"},
        "autonomy_level": 4,
        "checkpoint_policy": "none",
    },
    {
        "workflow_id": "at_risk_event",
        "trigger": {"kind": "event", "event": "consecutive_absence", "threshold": 3},
        "autonomy_level": 4,
        "checkpoint_policy": "none",
        "params": {"runner": "at_risk"},
    },
    {
        "workflow_id": "comparative",
        "trigger": {"kind": "on_demand"},
        "autonomy_level": 3,
        "checkpoint_policy": "none",
        "params": {
            "group_a": {"label": "morning", "slot": "morning"},
            "group_b": {"label": "afternoon", "slot": "afternoon"},
        },
    },
]

FLAGGED_LEVELS = ("warning", "critical")


@record
@dataclass(frozen=True)
class TriggerCursor:
    """Last period a scheduled workflow fired in; the scheduler's only state."""

    KIND = "wf_cursor"

    workflow_id: str
    period: str

    def storage_key(self) -> str:
        return self.workflow_id

    def to_payload(self) -> dict:
        return {"workflow_id": self.workflow_id, "period": self.period}

    @classmethod
    def from_payload(cls, p: dict) -> "TriggerCursor":
        return cls(workflow_id=p["workflow_id"], period=p["period"])


@record
@dataclass(frozen=True)
class WorkflowRun:
    """A persisted run: full transcript plus what it produced."""

    KIND = "wf_run"

    run_id: str
    workflow_id: str
    goal: str
    generated_at: int
    transcript: dict
    report_ids: tuple[str, ...] = ()
    pending_ids: tuple[str, ...] = ()

    def storage_key(self) -> str:
        return self.run_id

    def to_payload(self) -> dict:
        return {
            "run_id": self.run_id,
            "workflow_id": self.workflow_id,
            "goal": self.goal,
            "generated_at": self.generated_at,
            "transcript": self.transcript,
            "report_ids": list(self.report_ids),
            "pending_ids": list(self.pending_ids),
        }

    @classmethod
    def from_payload(cls, p: dict) -> "WorkflowRun":
        return cls(
            run_id=p["run_id"],
            workflow_id=p["workflow_id"],
            goal=p["goal"],
            generated_at=int(p["generated_at"]),
            transcript=dict(p["transcript"]),
            report_ids=tuple(p.get("report_ids", [])),
            pending_ids=tuple(p.get("pending_ids", [])),
        )


@dataclass(frozen=True)
class RunResult:
    run_id: str
    workflow_id: str
    as_of: date
    transcript: Transcript
    reports: tuple[InsightReport, ...]
    pending: tuple[PendingApproval, ...]


def _failed_observation(step: TranscriptStep) -> bool:
    return "error" in parse_observation(step)


class _HealthPlanner:
    def __init__(self, as_of: date, epoch: int):
        self.as_of = as_of
        self.epoch = epoch

    def next_step(self, goal: str, history: tuple[TranscriptStep, ...]) -> PlannerStep | None:
        i = len(history)
        if i > 0 and _failed_observation(history[-1]):
            return None
        if i == 0:
            return PlannerStep(
                "Scan attendance across the institution for the trailing window.",
                "health_scan",
                {"as_of": self.as_of.isoformat()},
            )
        if i == 1:
            check = HealthCheck.from_payload(parse_observation(history[0]))
            return PlannerStep(
                "Draft the health report from the scan results.",
                "draft_report",
                {
                    "title": "Daily Attendance Health Check",
                    "report_type": "daily_health",
                    "about": DAILY_HEALTH_ABOUT,
                    "subject": None,
                    "sections": [s.to_payload() for s in health_sections(check)],
                    "generated_at": self.epoch,
                },
            )
        if i == 2:
            report_id = parse_observation(history[1])["report_id"]
            return PlannerStep(
                "Publish the health report.", "publish_report", {"report_id": report_id}
            )
        if i == 3:
            report_id = parse_observation(history[2])["report_id"]
            return PlannerStep(
                "Health check complete.", FINISH, {"report_ids": [report_id]}
            )
        return None


class _AtRiskPlanner:
    def __init__(self, as_of: date, epoch: int, student: str | None = None):
        self.as_of = as_of
        self.epoch = epoch
        self.student = student

    def _flagged(self, history: tuple[TranscriptStep, ...]) -> list[dict]:
        first = parse_observation(history[0])
        payloads = [first] if self.student is not None else first["assessments"]
        return [p for p in payloads if p["risk_level"] in FLAGGED_LEVELS]

    def next_step(self, goal: str, history: tuple[TranscriptStep, ...]) -> PlannerStep | None:
        i = len(history)
        if i > 0 and _failed_observation(history[-1]):
            return None
        if i == 0:
            if self.student is not None:
                return PlannerStep(
                    f"Assess student {self.student} against the risk rule table.",
                    "assess_student",
                    {"student": self.student, "as_of": self.as_of.isoformat()},
                )
            return PlannerStep(
                "Scan every active student against the risk rule table.",
                "scan_at_risk",
                {"as_of": self.as_of.isoformat()},
            )
        flagged = self._flagged(history)
        j = i - 1
        if j < 2 * len(flagged):
            which, phase = divmod(j, 2)
            payload = flagged[which]
            if phase == 0:
                assessment = RiskAssessment.from_payload(payload)
                return PlannerStep(
                    f"Draft the at-risk report for {payload['student']}.",
                    "draft_report",
                    {
                        "title": "At-Risk Student Report",
                        "report_type": "student_insight",
                        "about": AT_RISK_ABOUT,
                        "subject": payload["student"],
                        "sections": [s.to_payload() for s in assessment_sections(assessment)],
                        "generated_at": self.epoch,
                    },
                )
            report_id = parse_observation(history[i - 1])["report_id"]
            return PlannerStep(
                f"Publish the report for {payload['student']}.",
                "publish_report",
                {"report_id": report_id},
            )
        if j == 2 * len(flagged):
            ids = [
                parse_observation(history[2 + 2 * m])["report_id"]
                for m in range(len(flagged))
            ]
            return PlannerStep(
                "Every flagged student has a published report.",
                FINISH,
                {"report_ids": ids},
            )
        return None


class _ComparativePlanner:
    def __init__(self, epoch: int, group_a: dict, group_b: dict, metrics: list | None):
        self.epoch = epoch
        self.group_a = group_a
        self.group_b = group_b
        self.metrics = metrics

    def next_step(self, goal: str, history: tuple[TranscriptStep, ...]) -> PlannerStep | None:
        i = len(history)
        if i > 0 and _failed_observation(history[-1]):
            return None
        if i == 0:
            return PlannerStep(
                f"Compute metrics for {self.group_a['label']} and {self.group_b['label']}.",
                "compare_groups",
                {"group_a": self.group_a, "group_b": self.group_b, "metrics": self.metrics},
            )
        if i == 1:
            comparison = Comparison.from_payload(parse_observation(history[0]))
            title = (
                f"Comparative Analysis: {comparison.group_a.label} vs "
                f"{comparison.group_b.label}"
            )
            return PlannerStep(
                "Draft the comparison report.",
                "draft_report",
                {
                    "title": title,
                    "report_type": "comparative",
                    "about": COMPARATIVE_ABOUT,
                    "subject": None,
                    "sections": [s.to_payload() for s in comparison_sections(comparison)],
                    "generated_at": self.epoch,
                },
            )
        if i == 2:
            report_id = parse_observation(history[1])["report_id"]
            return PlannerStep(
                "Publish the comparison report.", "publish_report", {"report_id": report_id}
            )
        if i == 3:
            report_id = parse_observation(history[2])["report_id"]
            return PlannerStep("Comparison complete.", FINISH, {"report_ids": [report_id]})
        return None


class WorkflowEngine:
    def __init__(
        self,
        store: Store,
        archive: Archive | None = None,
        configs: list[dict] | None = None,
        cuts: RiskCuts = DEFAULT_CUTS,
        targets: dict | None = None,
        window_days: int = DEFAULT_WINDOW_DAYS,
    ):
        self.store = store
        self.archive = archive if archive is not None else Archive()
        self.definitions = load_definitions(
            configs if configs is not None else DEFAULT_WORKFLOWS
        )
        self._by_id = {d.workflow_id: d for d in self.definitions}
        self.cuts = cuts
        self.registry = standard_registry(store, self.archive, cuts, targets, window_days)

    def definition(self, workflow_id: str) -> WorkflowDefinition:
        definition = self._by_id.get(workflow_id)
        if definition is None:
            raise NotFoundError(f"no workflow named {workflow_id}")
        return definition

    def _planner(self, runner: str, as_of: date, epoch: int, params: dict):
        if runner == "daily_health":
            return _HealthPlanner(as_of, epoch), f"daily_health {as_of.isoformat()}", MAX_STEPS
        if runner == "at_risk":
            student = params.get("student")
            goal = f"at_risk {as_of.isoformat()}"
            budget = MAX_STEPS
            if student is not None:
                goal = f"{goal} student {student}"
            else:
                # the batch path publishes one report per flagged student:
                # scan + (draft, publish) per student + finish
                cohort = {
                    e.student for e in self.store.list("enrollment")
                }
                budget = max(MAX_STEPS, 2 + 2 * len(cohort))
            return _AtRiskPlanner(as_of, epoch, student), goal, budget
        if runner == "comparative":
            group_a, group_b = params.get("group_a"), params.get("group_b")
            if not group_a or not group_b:
                raise ConfigurationError("comparative workflow needs group_a and group_b")
            planner = _ComparativePlanner(epoch, group_a, group_b, params.get("metrics"))
            goal = f"comparative {as_of.isoformat()} {group_a['label']} vs {group_b['label']}"
            return planner, goal, MAX_STEPS
        raise ConfigurationError(f"workflow runner {runner!r} is not implemented")

    def run(
        self,
        workflow_id: str,
        as_of: date,
        params: dict | None = None,
        actor: str = SYSTEM_ACTOR,
    ) -> RunResult:
        definition = self.definition(workflow_id)
        merged = {**definition.params, **(params or {})}
        runner = merged.get("runner", workflow_id)
        trigger = definition.trigger
        run_time = trigger.at if trigger.kind is TriggerKind.SCHEDULED else time(0, 0, 0)
        generated_at = datetime.combine(as_of, run_time, tzinfo=timezone.utc)
        epoch = int(generated_at.timestamp())
        planner, goal, budget = self._planner(runner, as_of, epoch, merged)

        def gate(tool, args):
            return gate_checkpoint(
                self.store, definition, tool.name, tool.kind, payload=args, now=generated_at
            )

        transcript, draft = run_react(goal, self.registry, planner, gate=gate, max_steps=budget)

        report_ids: list[str] = []
        pending_ids: list[str] = []
        for step in transcript.steps:
            name, args = step.action
            observation = parse_observation(step)
            if name in ("draft_report", "publish_report") and "report_id" in observation:
                if observation["report_id"] not in report_ids:
                    report_ids.append(observation["report_id"])
            if name == GATE_ACTION and observation.get("blocked"):
                if observation.get("approval_id"):
                    pending_ids.append(observation["approval_id"])
                blocked_args = args.get("args", {})
                if args.get("tool") == "publish_report" and "report_id" in blocked_args:
                    self._mark_pending(blocked_args["report_id"])
                    if blocked_args["report_id"] not in report_ids:
                        report_ids.append(blocked_args["report_id"])

        student = merged.get("student")
        run_id = f"{workflow_id}@{as_of.isoformat()}"
        if student is not None:
            run_id = f"{run_id}~{student}"
        self.store.upsert(
            WorkflowRun(
                run_id=run_id,
                workflow_id=workflow_id,
                goal=goal,
                generated_at=epoch,
                transcript=transcript.to_payload(),
                report_ids=tuple(report_ids),
                pending_ids=tuple(pending_ids),
            )
        )
        return RunResult(
            run_id=run_id,
            workflow_id=workflow_id,
            as_of=as_of,
            transcript=transcript,
            reports=tuple(self.store.require("report", rid) for rid in report_ids),
            pending=tuple(self.store.require("approval", pid) for pid in pending_ids),
        )

    def _mark_pending(self, report_id: str) -> None:
        report = self.store.get("report", report_id)
        if report is not None and report.status is ReportStatus.DRAFT:
            self.store.upsert(report.with_status(ReportStatus.PENDING_APPROVAL))

    def approve(self, approval_id: str, actor: str, now: datetime | None = None) -> dict:
        """Release a pending action: mark it approved, then execute it with
        the approval consumed on the way through the gate."""
        approval = decide_approval(self.store, approval_id, approve=True, actor=actor, now=now)
        definition = self.definition(approval.workflow_id)
        decision = gate_checkpoint(
            self.store,
            definition,
            approval.action,
            approval.action_kind,
            payload=approval.payload,
            now=now,
        )
        if not decision.proceed:  # cannot happen: the approval above matches
            raise ConfigurationError(f"approval {approval_id} did not release the gate")
        return self.registry.invoke(approval.action, approval.payload)

    def reject(self, approval_id: str, actor: str, now: datetime | None = None) -> PendingApproval:
        return decide_approval(self.store, approval_id, approve=False, actor=actor, now=now)

    def list_pending(self, workflow_id: str | None = None) -> list[PendingApproval]:
        return pending_approvals(self.store, workflow_id)

    def handle_event(self, event: Event, as_of: date, actor: str = SYSTEM_ACTOR) -> list[RunResult]:
        """Run every event-triggered workflow the event fires."""
        results = []
        for definition in self.definitions:
            fire, _ = evaluate_trigger(definition, event=event)
            if not fire:
                continue
            params = {}
            if "student" in event.context:
                params["student"] = event.context["student"]
            results.append(self.run(definition.workflow_id, as_of, params=params, actor=actor))
        return results

    def tick(self, now: datetime) -> list[RunResult]:
        """One scheduler pass: fire every scheduled workflow whose period
        boundary the clock has crossed, sequentially in definition order."""
        results = []
        for definition in self.definitions:
            if definition.trigger.kind is not TriggerKind.SCHEDULED:
                continue
            cursor = self.store.get("wf_cursor", definition.workflow_id)
            fire, period = evaluate_trigger(
                definition, clock=now, last_period=cursor.period if cursor else None
            )
            if fire:
                results.append(self.run(definition.workflow_id, now.date()))
                self.store.upsert(TriggerCursor(definition.workflow_id, period))
        return results
