"""The command line face.

Every verb routes through the same views as the HTTP endpoints, and
--json prints the exact canonical bytes the endpoint would return. The
default output is a small human table or key/value listing.

Exit codes: 0 success; 1 validation, configuration or usage problems;
2 missing or conflicting records; 3 anything internal.
"""

from __future__ import annotations

import json
import sys
from datetime import date, datetime, timezone

import click

from provost import canonical
from provost.core.audit import append_audit
from provost.core.csvio import import_csv
from provost.errors import (
    ConfigurationError,
    ConflictError,
    IntegrityError,
    NotFoundError,
    ProvostError,
    ValidationError,
)
from provost.fixtures import build_fixture
from provost.grading.decisions import auto_finalize_mcq, decide_grade, suggest_grade
from provost.grading.exams import create_exam
from provost.grading.scales import convert_grade
from provost.ingest.extractor import extract_specification
from provost.ingest.review import confirm_draft, load_draft, store_draft
from provost.outcomes.matrix import build_matrix, matrix_csv
from provost.reports.render import render_markdown
from provost.service import views
from provost.service.app import VERSION, create_app
from provost.service.config import Runtime, load_config, open_runtime


def _emit(payload, as_json: bool, human=None) -> None:
    if as_json or human is None:
        click.echo(canonical.dumps(payload))
    else:
        click.echo(human(payload))


def _kv(payload: dict) -> str:
    return "\n".join(f"{k}: {_cell(v)}" for k, v in payload.items())


def _cell(value) -> str:
    if isinstance(value, (dict, list)):
        return canonical.dumps(value)
    if value is None:
        return "-"
    return str(value)


def _table(rows: list[dict], columns: list[str] | None = None) -> str:
    if not rows:
        return "(empty)"
    if columns is None:
        columns = [k for k, v in rows[0].items() if not isinstance(v, (dict, list))]
    widths = {c: max(len(c), *(len(_cell(r.get(c))) for r in rows)) for c in columns}
    head = "  ".join(c.ljust(widths[c]) for c in columns)
    rule = "  ".join("-" * widths[c] for c in columns)
    body = ("  ".join(_cell(r.get(c)).ljust(widths[c]) for c in columns) for r in rows)
    return "\n".join([head, rule, *body])


def _audit_cli(runtime: Runtime, actor: str, verb: str, subject: str) -> None:
    append_audit(runtime.store, actor=actor, action=f"cli.{verb}", subject=subject)


_json_flag = click.option("--json", "as_json", is_flag=True, help="Print canonical JSON.")
_actor_opt = click.option("--actor", default="cli", show_default=True, help="Actor recorded in the audit trail.")


@click.group()
@click.version_option(VERSION, prog_name="provost")
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Path to the service config JSON; omitted means built-in defaults with an in-memory store.",
)
@click.pass_context
def cli(ctx: click.Context, config_path: str | None) -> None:
    """Institutional QA engine: records, grading, outcomes, workflows."""
    ctx.obj = open_runtime(load_config(config_path))


# ---------------------------------------------------------------- entities


@cli.group()
def entities() -> None:
    """List and upsert stored records."""


@entities.command("list")
@click.argument("kind")
@_json_flag
@click.pass_obj
def entities_list(runtime: Runtime, kind: str, as_json: bool) -> None:
    _emit(views.entities_view(runtime.store, kind), as_json, _table)


@entities.command("put")
@click.argument("kind")
@click.option("--data", help="Record payload as inline JSON.")
@click.option("--file", "path", type=click.File("r"), help="Record payload from a JSON file.")
@_actor_opt
@_json_flag
@click.pass_obj
def entities_put(runtime: Runtime, kind: str, data: str | None, path, actor: str, as_json: bool) -> None:
    if (data is None) == (path is None):
        raise ValidationError("give exactly one of --data or --file", field="data")
    try:
        payload = json.loads(data if data is not None else path.read())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"payload is not valid JSON: {exc}", field="data") from exc
    cls = views.entity_kind(kind)
    try:
        record = cls.from_payload(payload)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed {kind} payload: {exc}") from exc
    ref = runtime.store.upsert(record)
    _audit_cli(runtime, actor, f"entities.{kind}", str(ref))
    out = {"kind": ref.kind, "key": ref.key, "revision": runtime.store.revision(ref.kind, ref.key)}
    _emit(out, as_json, _kv)


@cli.command("import")
@click.argument("kind")
@click.argument("csvfile", type=click.File("r"))
@_actor_opt
@_json_flag
@click.pass_obj
def import_cmd(runtime: Runtime, kind: str, csvfile, actor: str, as_json: bool) -> None:
    """Import a CSV file of KIND (attendance, enrollment, student, ...)."""
    summary = import_csv(runtime.store, kind, csvfile.read())
    _audit_cli(runtime, actor, f"import.{kind}", f"accepted:{summary.accepted}")

    def human(p: dict) -> str:
        lines = [f"accepted: {p['accepted']}"]
        lines += [f"line {r['line']}: {r['reason']}" for r in p["rejected"]]
        return "\n".join(lines)

    _emit(summary.to_payload(), as_json, human)


# ------------------------------------------------------------------ ingest


@cli.group()
def ingest() -> None:
    """Extract course specifications and confirm them."""


@ingest.command("extract")
@click.argument("document", type=click.File("r"))
@_actor_opt
@_json_flag
@click.pass_obj
def ingest_extract(runtime: Runtime, document, actor: str, as_json: bool) -> None:
    draft = extract_specification(document.read())
    store_draft(runtime.store, draft)
    _audit_cli(runtime, actor, "ingest.extract", f"draft_spec:{draft.draft_id}")

    def human(p: dict) -> str:
        lines = [
            f"draft {draft.draft_id} for course {p.get('course') or '?'}",
            f"clos: {len(p.get('clos', []))}",
        ]
        lines += [f"{w['severity']} {w['field']}: {w['message']}" for w in p.get("warnings", [])]
        return "\n".join(lines)

    _emit(draft.to_payload(), as_json, human)


@ingest.command("confirm")
@click.argument("draft_id")
@click.option("--reviewer", required=True, help="Reviewer recorded on the confirmation.")
@_json_flag
@click.pass_obj
def ingest_confirm(runtime: Runtime, draft_id: str, reviewer: str, as_json: bool) -> None:
    draft = load_draft(runtime.store, draft_id)
    spec = confirm_draft(runtime.store, draft, reviewer=reviewer)
    _emit(spec.to_payload(), as_json, _kv)


# -------------------------------------------------------------------- exam


@cli.group()
def exam() -> None:
    """Create exams from blueprints."""


@exam.command("create")
@click.option("--offering", required=True)
@click.option("--blueprint", "blueprint_file", type=click.File("r"), required=True,
              help="JSON list of {kind, clo_links, bloom_level?, max_points} rows.")
@click.option("--exam-id", default=None)
@_actor_opt
@_json_flag
@click.pass_obj
def exam_create(runtime: Runtime, offering: str, blueprint_file, exam_id: str | None,
                actor: str, as_json: bool) -> None:
    try:
        raw = json.loads(blueprint_file.read())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"blueprint is not valid JSON: {exc}", field="blueprint") from exc
    if not isinstance(raw, list) or not raw:
        raise ValidationError("blueprint must be a non-empty list", field="blueprint")
    created = create_exam(runtime.store, offering, views.parse_blueprint(raw), exam_id=exam_id)
    _audit_cli(runtime, actor, "exams", f"exam:{created.exam_id}")
    _emit(created.to_payload(), as_json, _kv)


# ------------------------------------------------------------------- grade


@cli.group()
def grade() -> None:
    """Suggest, review and convert grades."""


def _decision_payload(runtime: Runtime, exam_id: str, q_id: str, student: str) -> dict:
    return runtime.store.require("decision", f"{exam_id}~{q_id}~{student}").to_payload()


@grade.command("suggest")
@click.option("--exam", "exam_id", required=True)
@click.option("--question", "q_id", required=True)
@click.option("--student", required=True)
@_json_flag
@click.pass_obj
def grade_suggest(runtime: Runtime, exam_id: str, q_id: str, student: str, as_json: bool) -> None:
    suggest_grade(runtime.store, exam_id, q_id, student)
    _emit(_decision_payload(runtime, exam_id, q_id, student), as_json, _kv)


@grade.command("decide")
@click.option("--exam", "exam_id", required=True)
@click.option("--question", "q_id", required=True)
@click.option("--student", required=True)
@click.option("--action", required=True,
              type=click.Choice(["accepted", "adjusted", "overridden", "human_direct"]))
@click.option("--points", type=float, default=None)
@click.option("--feedback", default=None)
@click.option("--actor", required=True, help="Deciding teacher; recorded on the grade.")
@_json_flag
@click.pass_obj
def grade_decide(runtime: Runtime, exam_id: str, q_id: str, student: str, action: str,
                 points: float | None, feedback: str | None, actor: str, as_json: bool) -> None:
    decision = decide_grade(
        runtime.store, exam_id, q_id, student, action,
        actor=actor, points=points, feedback=feedback,
    )
    _emit(decision.to_payload(), as_json, _kv)


@grade.command("auto")
@click.option("--exam", "exam_id", required=True)
@click.option("--question", "q_id", required=True)
@click.option("--student", required=True)
@click.option("--level", type=int, default=3, show_default=True,
              help="Autonomy level the caller is operating at.")
@_json_flag
@click.pass_obj
def grade_auto(runtime: Runtime, exam_id: str, q_id: str, student: str, level: int, as_json: bool) -> None:
    """Machine-finalize one multiple choice answer."""
    decision = auto_finalize_mcq(runtime.store, exam_id, q_id, student, level)
    _emit(decision.to_payload(), as_json, _kv)


@grade.command("queue")
@click.option("--offering", default=None)
@_json_flag
@click.pass_obj
def grade_queue(runtime: Runtime, offering: str | None, as_json: bool) -> None:
    """Suggestions awaiting human review."""
    rows = views.queue_view(runtime.store, offering)

    def human(payload: list[dict]) -> str:
        flat = [
            {
                "exam_id": r["exam_id"], "q_id": r["q_id"], "student": r["student"],
                "kind": r["question_kind"],
                "suggested": f"{r['suggestion']['points']:g}/{r['max_points']:g}",
            }
            for r in payload
        ]
        return _table(flat)

    _emit(rows, as_json, human)


@grade.command("audit")
@click.option("--subject", default=None)
@click.option("--action", default=None)
@click.option("--actor", default=None)
@_json_flag
@click.pass_obj
def grade_audit(runtime: Runtime, subject: str | None, action: str | None,
                actor: str | None, as_json: bool) -> None:
    rows = views.audit_view(runtime.store, subject=subject, action=action, actor=actor)
    _emit(rows, as_json, _table)


@grade.command("convert")
@click.argument("percent", type=float)
@_json_flag
@click.pass_obj
def grade_convert(runtime: Runtime, percent: float, as_json: bool) -> None:
    """Show one percent grade on both reporting scales."""
    dual = convert_grade(percent, runtime.config.grade_mapping)
    _emit(dual.to_payload(), as_json, _kv)


# ---------------------------------------------------------------- outcomes


@cli.group()
def outcomes() -> None:
    """CLO and PLO achievement, the mapping matrix, compliance."""


@outcomes.command("clo")
@click.option("--offering", required=True)
@click.option("--clo", "clo_id", required=True)
@click.option("--threshold", type=float, default=None)
@click.option("--target-share", type=float, default=None)
@_json_flag
@click.pass_obj
def outcomes_clo(runtime: Runtime, offering: str, clo_id: str,
                 threshold: float | None, target_share: float | None, as_json: bool) -> None:
    _emit(views.clo_view(runtime.store, offering, clo_id, threshold, target_share), as_json, _kv)


@outcomes.command("plo")
@click.option("--program", required=True)
@click.option("--term", required=True)
@_json_flag
@click.pass_obj
def outcomes_plo(runtime: Runtime, program: str, term: str, as_json: bool) -> None:
    payload = views.plo_view(runtime.store, program, term)
    _emit(payload, as_json, lambda p: _table(p["plos"]))


@outcomes.command("matrix")
@click.option("--program", required=True)
@click.option("--term", required=True)
@_json_flag
@click.pass_obj
def outcomes_matrix(runtime: Runtime, program: str, term: str, as_json: bool) -> None:
    if as_json:
        _emit(views.matrix_view(runtime.store, program, term), True)
    else:
        click.echo(matrix_csv(build_matrix(runtime.store, program, term)))


@outcomes.command("comply")
@click.option("--program", required=True)
@_json_flag
@click.pass_obj
def outcomes_comply(runtime: Runtime, program: str, as_json: bool) -> None:
    payload = views.comply_view(runtime.store, program, runtime.config.ruleset)

    def human(p: dict) -> str:
        if p["clean"]:
            return f"program {p['program']}: compliant"
        return _table(p["findings"], ["rule", "severity", "subject", "message"])

    _emit(payload, as_json, human)


# ---------------------------------------------------------------------- wf


@cli.group()
def wf() -> None:
    """Run workflows, answer checkpoints, drive the scheduler."""


def _run_human(p: dict) -> str:
    lines = [f"run {p['run_id']}: {p['terminal']}"]
    lines += [f"report {rid}" for rid in p["report_ids"]]
    lines += [f"pending approval {a['approval_id']}: {a['action']}" for a in p["pending"]]
    return "\n".join(lines)


@wf.command("run")
@click.argument("workflow")
@click.option("--date", "as_of_raw", default=None, help="Run date (YYYY-MM-DD); defaults to today.")
@click.option("--student", default=None, help="Restrict a student workflow to one student.")
@_actor_opt
@_json_flag
@click.pass_obj
def wf_run(runtime: Runtime, workflow: str, as_of_raw: str | None, student: str | None,
           actor: str, as_json: bool) -> None:
    as_of = views.parse_iso_date(as_of_raw, "date") if as_of_raw else date.today()
    params = {"student": student} if student else None
    result = runtime.engine.run(workflow, as_of, params=params, actor=actor)
    _emit(views.run_view(result), as_json, _run_human)


@wf.command("approve")
@click.argument("approval_id")
@click.option("--reject", is_flag=True, help="Reject instead of approving.")
@click.option("--actor", required=True, help="Approving coordinator; recorded on the decision.")
@_json_flag
@click.pass_obj
def wf_approve(runtime: Runtime, approval_id: str, reject: bool, actor: str, as_json: bool) -> None:
    if reject:
        runtime.engine.reject(approval_id, actor=actor)
        payload = {"approval_id": approval_id, "status": "rejected"}
    else:
        outcome = runtime.engine.approve(approval_id, actor=actor)
        payload = {"approval_id": approval_id, "status": "approved", "result": outcome}
    _emit(payload, as_json, _kv)


@wf.command("pending")
@click.option("--workflow", default=None)
@_json_flag
@click.pass_obj
def wf_pending(runtime: Runtime, workflow: str | None, as_json: bool) -> None:
    payload = [p.to_payload() for p in runtime.engine.list_pending(workflow)]
    _emit(payload, as_json, _table)


@wf.command("tick")
@click.option("--at", "at_raw", required=True, help="Clock time for the pass (ISO-8601).")
@_json_flag
@click.pass_obj
def wf_tick(runtime: Runtime, at_raw: str, as_json: bool) -> None:
    """One scheduler pass: run every scheduled workflow that is due."""
    try:
        now = datetime.fromisoformat(at_raw)
    except ValueError:
        raise ValidationError(f"--at: expected ISO-8601 datetime, got {at_raw!r}", field="at") from None
    if now.tzinfo is None:
        now = now.replace(tzinfo=timezone.utc)
    results = runtime.engine.tick(now)
    payload = [views.run_view(r) for r in results]
    _emit(payload, as_json, lambda p: "\n".join(_run_human(r) for r in p) or "(nothing due)")


@wf.command("event")
@click.option("--kind", required=True, help="Event kind, e.g. consecutive_absence.")
@click.option("--value", type=int, required=True)
@click.option("--student", default=None)
@click.option("--date", "as_of_raw", required=True, help="Date the event refers to (YYYY-MM-DD).")
@_json_flag
@click.pass_obj
def wf_event(runtime: Runtime, kind: str, value: int, student: str | None,
             as_of_raw: str, as_json: bool) -> None:
    """Feed one external event through the trigger table."""
    from provost.workflows.definitions import Event

    as_of = views.parse_iso_date(as_of_raw, "date")
    context = {"student": student} if student else {}
    results = runtime.engine.handle_event(Event(kind=kind, value=value, context=context), as_of)
    payload = [views.run_view(r) for r in results]
    _emit(payload, as_json, lambda p: "\n".join(_run_human(r) for r in p) or "(no workflow fired)")


# ------------------------------------------------------------------ report


@cli.group()
def report() -> None:
    """Inspect generated reports."""


@report.command("list")
@click.option("--type", "report_type", default=None)
@click.option("--status", default=None)
@click.option("--subject", default=None)
@_json_flag
@click.pass_obj
def report_list(runtime: Runtime, report_type: str | None, status: str | None,
                subject: str | None, as_json: bool) -> None:
    rows = views.reports_view(runtime.store, report_type, status, subject)
    _emit(rows, as_json, lambda p: _table(p, ["report_id", "report_type", "status", "title", "subject"]))


@report.command("show")
@click.argument("report_id")
@_json_flag
@click.pass_obj
def report_show(runtime: Runtime, report_id: str, as_json: bool) -> None:
    """Print one report, as markdown by default."""
    rec = runtime.store.require("report", report_id)
    _emit(rec.to_payload(), as_json, lambda p: render_markdown(rec))


# ----------------------------------------------------------------- fixture


@cli.command("fixture")
@click.pass_obj
def fixture(runtime: Runtime) -> None:
    """Load the demo dataset into the configured store."""
    if runtime.store.exists("institution", "i1"):
        raise ConflictError("fixture already loaded in this store")
    build_fixture(runtime.store)
    click.echo("demo dataset loaded")


# ------------------------------------------------------------------- serve


@cli.command("serve")
@click.option("--host", default=None, help="Override the configured listen host.")
@click.option("--port", type=int, default=None, help="Override the configured listen port.")
@click.pass_obj
def serve(runtime: Runtime, host: str | None, port: int | None) -> None:
    """Run the HTTP service until interrupted."""
    import uvicorn

    app = create_app(runtime=runtime)
    uvicorn.run(
        app,
        host=host if host is not None else runtime.config.host,
        port=port if port is not None else runtime.config.port,
    )


def _fail(exc: ProvostError, code: int) -> int:
    click.echo(canonical.dumps(exc.to_payload()), err=True)
    return code


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except (ValidationError, ConfigurationError) as exc:
        return _fail(exc, 1)
    except (NotFoundError, IntegrityError, ConflictError) as exc:
        return _fail(exc, 2)
    except ProvostError as exc:
        return _fail(exc, 3)
    return 0


if __name__ == "__main__":
    sys.exit(main())
