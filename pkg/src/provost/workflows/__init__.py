"""Trigger-driven agent workflows over the unified store."""

from provost.workflows.compare import compare_groups, resolve_filter
from provost.workflows.definitions import (
    Event,
    Trigger,
    TriggerKind,
    WorkflowDefinition,
    evaluate_trigger,
    load_definitions,
)
from provost.workflows.engine import WorkflowEngine
from provost.workflows.gating import CheckpointPolicy, GateDecision, PendingApproval, gate_checkpoint
from provost.workflows.health import run_daily_health_check
from provost.workflows.react import Planner, PlannerStep, Transcript, TranscriptStep, run_react
from provost.workflows.risk import RiskAssessment, RiskLevel, classify_risk, detect_at_risk
from provost.workflows.toolbox import ToolContract, ToolRegistry, standard_registry

__all__ = [
    "CheckpointPolicy",
    "Event",
    "GateDecision",
    "PendingApproval",
    "Planner",
    "PlannerStep",
    "RiskAssessment",
    "RiskLevel",
    "ToolContract",
    "ToolRegistry",
    "Transcript",
    "TranscriptStep",
    "Trigger",
    "TriggerKind",
    "WorkflowDefinition",
    "WorkflowEngine",
    "classify_risk",
    "compare_groups",
    "detect_at_risk",
    "evaluate_trigger",
    "gate_checkpoint",
    "load_definitions",
    "resolve_filter",
    "run_daily_health_check",
    "run_react",
    "standard_registry",
]
