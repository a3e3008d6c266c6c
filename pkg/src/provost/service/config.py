"""Service configuration: one JSON file, validated wholly at startup.

The service trusts the file completely once it is running, so everything
is checked up front: unknown keys, bad types, out-of-range ports, unknown
role names, malformed grade bands, inverted risk cuts, bad workflow
definitions. Any problem raises ConfigurationError naming the offending
field and the process refuses to start.

Role model: a static actor -> role map plus a request header. Three
roles, strictly ordered: instructor < coordinator < admin. Instructors
act only on offerings they teach; coordinators review, approve and run
workflows; admins manage master data. There is deliberately no credential
system, only provenance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from provost.core.store import Store
from provost.errors import ConfigurationError, ProvostError, RoleError
from provost.fixtures import build_fixture
from provost.grading.scales import DEFAULT_MAPPING, GradeMapping
from provost.outcomes.compliance import DEFAULT_RULESET, Ruleset, load_ruleset
from provost.reports.archive import Archive
from provost.workflows.engine import DEFAULT_WORKFLOWS, WorkflowEngine
from provost.workflows.definitions import load_definitions
from provost.workflows.health import DEFAULT_TARGETS, DEFAULT_WINDOW_DAYS
from provost.workflows.risk import DEFAULT_CUTS, RiskCuts

ROLE_ORDER = {"instructor": 0, "coordinator": 1, "admin": 2}

_TOP_KEYS = {
    "store", "archive", "listen", "roles", "grade_mapping", "risk",
    "targets", "window_days", "workflows", "compliance", "fixture",
}

_RISK_KEYS = set(RiskCuts.__dataclass_fields__)


@dataclass(frozen=True)
class ServiceConfig:
    store_path: str | None = None
    archive_path: str | None = None
    host: str = "127.0.0.1"
    port: int = 8571
    roles: dict[str, str] = field(default_factory=lambda: {"admin": "admin"})
    grade_mapping: GradeMapping = DEFAULT_MAPPING
    cuts: RiskCuts = DEFAULT_CUTS
    targets: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TARGETS))
    window_days: int = DEFAULT_WINDOW_DAYS
    workflows: tuple[dict, ...] = tuple(DEFAULT_WORKFLOWS)
    ruleset: Ruleset = DEFAULT_RULESET
    load_fixture: bool = False

    def role_of(self, actor: str | None) -> str:
        """Resolve an actor to a role or refuse; None means no header."""
        if not actor:
            raise RoleError("actor header required for this action")
        role = self.roles.get(actor)
        if role is None:
            raise RoleError(f"actor {actor!r} has no role assigned")
        return role

    def require_role(self, actor: str | None, minimum: str) -> str:
        role = self.role_of(actor)
        if ROLE_ORDER[role] < ROLE_ORDER[minimum]:
            raise RoleError(f"{minimum} role required, {actor!r} is {role}")
        return role


def _expect(value, types, name: str):
    if not isinstance(value, types):
        wanted = types[0].__name__ if isinstance(types, tuple) else types.__name__
        raise ConfigurationError(f"{name}: expected {wanted}, got {type(value).__name__}")
    return value


def config_from_dict(data: dict) -> ServiceConfig:
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigurationError(f"unknown config field {sorted(unknown)[0]!r}")

    kwargs: dict = {}
    if data.get("store") is not None:
        kwargs["store_path"] = _expect(data["store"], str, "store")
    if data.get("archive") is not None:
        kwargs["archive_path"] = _expect(data["archive"], str, "archive")

    listen = _expect(data.get("listen", {}), dict, "listen")
    if set(listen) - {"host", "port"}:
        raise ConfigurationError("listen: only host and port are allowed")
    if "host" in listen:
        kwargs["host"] = _expect(listen["host"], str, "listen.host")
    if "port" in listen:
        port = listen["port"]
        if not isinstance(port, int) or isinstance(port, bool) or not (1 <= port <= 65535):
            raise ConfigurationError("listen.port: expected an integer in 1..65535")
        kwargs["port"] = port

    if "roles" in data:
        roles = _expect(data["roles"], dict, "roles")
        for actor, role in roles.items():
            if role not in ROLE_ORDER:
                raise ConfigurationError(
                    f"roles.{actor}: unknown role {role!r}, expected one of {sorted(ROLE_ORDER)}"
                )
        kwargs["roles"] = dict(roles)

    if "grade_mapping" in data:
        bands = _expect(data["grade_mapping"], list, "grade_mapping")
        try:
            kwargs["grade_mapping"] = GradeMapping.from_payload(bands)
        except ProvostError as exc:
            raise ConfigurationError(f"grade_mapping: {exc.message}") from exc
        except (KeyError, TypeError) as exc:
            raise ConfigurationError(f"grade_mapping: malformed band ({exc})") from exc

    if "risk" in data:
        risk = _expect(data["risk"], dict, "risk")
        bad = set(risk) - _RISK_KEYS
        if bad:
            raise ConfigurationError(f"risk.{sorted(bad)[0]}: unknown cut")
        for name, value in risk.items():
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigurationError(f"risk.{name}: expected a number")
        kwargs["cuts"] = RiskCuts.from_config(risk)

    if "targets" in data:
        targets = _expect(data["targets"], dict, "targets")
        bad = set(targets) - set(DEFAULT_TARGETS)
        if bad:
            raise ConfigurationError(f"targets.{sorted(bad)[0]}: unknown scope")
        for name, value in targets.items():
            if not isinstance(value, (int, float)) or isinstance(value, bool) or not (0 <= value <= 1):
                raise ConfigurationError(f"targets.{name}: expected a fraction in [0, 1]")
        kwargs["targets"] = {**DEFAULT_TARGETS, **targets}

    if "window_days" in data:
        days = data["window_days"]
        if not isinstance(days, int) or isinstance(days, bool) or days < 1:
            raise ConfigurationError("window_days: expected a positive integer")
        kwargs["window_days"] = days

    if "workflows" in data:
        workflows = _expect(data["workflows"], list, "workflows")
        load_definitions(workflows)  # full parse now, so serve never starts on bad definitions
        kwargs["workflows"] = tuple(workflows)

    if "compliance" in data:
        kwargs["ruleset"] = load_ruleset(_expect(data["compliance"], dict, "compliance"))

    if "fixture" in data:
        kwargs["load_fixture"] = _expect(data["fixture"], bool, "fixture")

    return ServiceConfig(**kwargs)


def load_config(path: str | Path | None) -> ServiceConfig:
    if path is None:
        return ServiceConfig()
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path}: invalid JSON ({exc})") from exc
    return config_from_dict(_expect(data, dict, "config"))


@dataclass
class Runtime:
    """Everything a request or CLI verb needs, built once from config."""

    config: ServiceConfig
    store: Store
    archive: Archive
    engine: WorkflowEngine


def open_runtime(config: ServiceConfig) -> Runtime:
    store = Store(config.store_path)
    archive = Archive(config.archive_path)
    engine = WorkflowEngine(
        store,
        archive,
        configs=list(config.workflows),
        cuts=config.cuts,
        targets=dict(config.targets),
        window_days=config.window_days,
    )
    if config.load_fixture and not store.exists("institution", "i1"):
        build_fixture(store)
    return Runtime(config=config, store=store, archive=archive, engine=engine)
