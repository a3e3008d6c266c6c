"""The HTTP face.

Conventions, applied uniformly:

* responses are canonical JSON bytes, so an endpoint and its CLI verb
  agree to the byte for the same store;
* the actor arrives in the X-Actor header and is resolved against the
  static role map; reads are open, every mutation is role-gated;
* plain instructors act only on offerings they teach, coordinators and
  admins on everything;
* every mutating request that succeeds appends an audit row naming the
  actor and the endpoint, on top of whatever the domain layer audited;
* domain errors map to statuses by their code, with the {code, message,
  field?} payload passed through untouched.
"""

from __future__ import annotations

from datetime import date
from importlib import metadata

from fastapi import Body, FastAPI, Header, Query, Request, Response

from provost import canonical
from provost.core.audit import append_audit
from provost.core.csvio import import_csv
from provost.errors import NotFoundError, ProvostError, RoleError, ValidationError
from provost.grading.decisions import decide_grade, suggest_grade
from provost.grading.exams import create_exam
from provost.grading.scales import convert_grade
from provost.ingest.extractor import extract_specification
from provost.ingest.review import confirm_draft, load_draft, store_draft
from provost.reports.render import render_markdown
from provost.service import views
from provost.service.config import ROLE_ORDER, Runtime, ServiceConfig, open_runtime
from provost.workflows.engine import RunResult

HTTP_STATUS = {
    "validation": 422,
    "integrity": 422,
    "not_found": 404,
    "conflict": 409,
    "configuration": 400,
    "adapter": 502,
    "forbidden": 403,
    "internal": 500,
}

try:
    VERSION = metadata.version("provost")
except metadata.PackageNotFoundError:  # running from a checkout
    VERSION = "0.0.0"


def _json(payload) -> Response:
    return Response(canonical.dumps(payload), media_type="application/json")


def _field(body: dict, name: str) -> str:
    value = body.get(name)
    if not isinstance(value, str) or not value:
        raise ValidationError(f"{name} is required", field=name)
    return value


def create_app(config: ServiceConfig | None = None, runtime: Runtime | None = None) -> FastAPI:
    if runtime is None:
        runtime = open_runtime(config if config is not None else ServiceConfig())
    app = FastAPI(title="provost", version=VERSION, docs_url=None, redoc_url=None)
    app.state.runtime = runtime
    store = runtime.store
    engine = runtime.engine
    cfg = runtime.config

    @app.exception_handler(ProvostError)
    def _domain_error(request: Request, exc: ProvostError) -> Response:
        return Response(
            canonical.dumps(exc.to_payload()),
            status_code=HTTP_STATUS.get(exc.code, 500),
            media_type="application/json",
        )

    def _audit(actor: str, endpoint: str, subject: str) -> None:
        append_audit(store, actor=actor, action=f"api.{endpoint}", subject=subject)

    def _own_offering(actor: str, role: str, offering_key: str) -> None:
        # plain instructors are scoped to offerings they teach
        if ROLE_ORDER[role] >= ROLE_ORDER["coordinator"]:
            return
        offering = store.require("offering", offering_key)
        if offering.instructor != actor:
            raise RoleError(f"{actor!r} does not teach offering {offering_key}")

    # ------------------------------------------------------------- reads

    @app.get("/health")
    def health() -> Response:
        return _json({"status": "ok", "version": VERSION})

    @app.get("/entities/{kind}")
    def list_entities(kind: str) -> Response:
        return _json(views.entities_view(store, kind))

    @app.get("/entities/{kind}/{key}")
    def get_entity(kind: str, key: str) -> Response:
        views.entity_kind(kind)
        return _json(store.require(kind, key).to_payload())

    @app.get("/grades/audit")
    def grades_audit(
        subject: str | None = Query(default=None),
        action: str | None = Query(default=None),
        actor: str | None = Query(default=None),
    ) -> Response:
        return _json(views.audit_view(store, subject=subject, action=action, actor=actor))

    @app.get("/grades/queue")
    def grades_queue(offering: str | None = Query(default=None)) -> Response:
        return _json(views.queue_view(store, offering))

    @app.get("/grades/convert")
    def grades_convert(percent: float = Query()) -> Response:
        return _json(convert_grade(percent, cfg.grade_mapping).to_payload())

    @app.get("/outcomes/clo")
    def outcomes_clo(
        offering: str = Query(),
        clo: str = Query(),
        threshold: float | None = Query(default=None),
        target_share: float | None = Query(default=None),
    ) -> Response:
        return _json(views.clo_view(store, offering, clo, threshold, target_share))

    @app.get("/outcomes/plo")
    def outcomes_plo(program: str = Query(), term: str = Query()) -> Response:
        return _json(views.plo_view(store, program, term))

    @app.get("/outcomes/matrix")
    def outcomes_matrix(program: str = Query(), term: str = Query()) -> Response:
        return _json(views.matrix_view(store, program, term))

    @app.get("/outcomes/comply")
    def outcomes_comply(program: str = Query()) -> Response:
        return _json(views.comply_view(store, program, cfg.ruleset))

    @app.get("/wf/pending")
    def wf_pending(workflow: str | None = Query(default=None)) -> Response:
        return _json([p.to_payload() for p in engine.list_pending(workflow)])

    @app.get("/reports")
    def reports_list(
        type: str | None = Query(default=None),
        status: str | None = Query(default=None),
        subject: str | None = Query(default=None),
    ) -> Response:
        return _json(views.reports_view(store, type, status, subject))

    @app.get("/reports/{report_id}")
    def report_get(report_id: str) -> Response:
        return _json(store.require("report", report_id).to_payload())

    @app.get("/reports/{report_id}/markdown")
    def report_markdown(report_id: str) -> Response:
        report = store.require("report", report_id)
        return Response(render_markdown(report), media_type="text/markdown")

    # --------------------------------------------------------- mutations

    @app.post("/entities/{kind}")
    def put_entity(
        kind: str,
        body: dict = Body(),
        x_actor: str | None = Header(default=None),
    ) -> Response:
        cfg.require_role(x_actor, "admin")
        cls = views.entity_kind(kind)
        try:
            record = cls.from_payload(body)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed {kind} payload: {exc}") from exc
        ref = store.upsert(record)
        _audit(x_actor, f"entities.{kind}", str(ref))
        return _json(
            {"kind": ref.kind, "key": ref.key, "revision": store.revision(ref.kind, ref.key)}
        )

    @app.post("/import/{kind}")
    def import_kind(
        kind: str,
        body: dict = Body(),
        x_actor: str | None = Header(default=None),
    ) -> Response:
        cfg.require_role(x_actor, "admin")
        summary = import_csv(store, kind, _field(body, "csv"))
        _audit(x_actor, f"import.{kind}", f"accepted:{summary.accepted}")
        return _json(summary.to_payload())

    @app.post("/ingest/extract")
    def ingest_extract(
        body: dict = Body(),
        x_actor: str | None = Header(default=None),
    ) -> Response:
        cfg.require_role(x_actor, "coordinator")
        draft = extract_specification(_field(body, "text"))
        store_draft(store, draft)
        _audit(x_actor, "ingest.extract", f"draft_spec:{draft.draft_id}")
        return _json(draft.to_payload())

    @app.post("/ingest/confirm")
    def ingest_confirm(
        body: dict = Body(),
        x_actor: str | None = Header(default=None),
    ) -> Response:
        cfg.require_role(x_actor, "coordinator")
        draft = load_draft(store, _field(body, "draft_id"))
        spec = confirm_draft(store, draft, reviewer=x_actor)
        _audit(x_actor, "ingest.confirm", f"course_spec:{spec.course}")
        return _json(spec.to_payload())

    @app.post("/exams")
    def post_exam(
        body: dict = Body(),
        x_actor: str | None = Header(default=None),
    ) -> Response:
        role = cfg.require_role(x_actor, "instructor")
        offering = _field(body, "offering")
        _own_offering(x_actor, role, offering)
        blueprint = body.get("blueprint")
        if not isinstance(blueprint, list) or not blueprint:
            raise ValidationError("blueprint must be a non-empty list", field="blueprint")
        exam = create_exam(
            store, offering, views.parse_blueprint(blueprint), exam_id=body.get("exam_id")
        )
        _audit(x_actor, "exams", f"exam:{exam.exam_id}")
        return _json(exam.to_payload())

    @app.post("/grades/suggest")
    def grades_suggest(
        body: dict = Body(),
        x_actor: str | None = Header(default=None),
    ) -> Response:
        role = cfg.require_role(x_actor, "instructor")
        exam = store.require("exam", _field(body, "exam_id"))
        _own_offering(x_actor, role, exam.offering)
        suggest_grade(store, exam.exam_id, _field(body, "q_id"), _field(body, "student"))
        key = f"{exam.exam_id}~{body['q_id']}~{body['student']}"
        _audit(x_actor, "grades.suggest", f"decision:{key}")
        return _json(store.require("decision", key).to_payload())

    @app.post("/grades/decide")
    def grades_decide(
        body: dict = Body(),
        x_actor: str | None = Header(default=None),
    ) -> Response:
        role = cfg.require_role(x_actor, "instructor")
        exam = store.require("exam", _field(body, "exam_id"))
        _own_offering(x_actor, role, exam.offering)
        points = body.get("points")
        if points is not None and not isinstance(points, (int, float)):
            raise ValidationError("points must be a number", field="points")
        decision = decide_grade(
            store,
            exam.exam_id,
            _field(body, "q_id"),
            _field(body, "student"),
            _field(body, "action"),
            actor=x_actor,
            points=points,
            feedback=body.get("feedback"),
        )
        _audit(x_actor, "grades.decide", f"decision:{decision.storage_key()}")
        return _json(decision.to_payload())

    @app.post("/wf/run")
    def wf_run(
        body: dict = Body(),
        x_actor: str | None = Header(default=None),
    ) -> Response:
        cfg.require_role(x_actor, "coordinator")
        workflow = _field(body, "workflow")
        as_of = (
            views.parse_iso_date(body["date"], "date") if body.get("date") else date.today()
        )
        params = body.get("params")
        if params is not None and not isinstance(params, dict):
            raise ValidationError("params must be an object", field="params")
        result: RunResult = engine.run(workflow, as_of, params=params, actor=x_actor)
        _audit(x_actor, "wf.run", f"wf_run:{result.run_id}")
        return _json(views.run_view(result))

    @app.post("/wf/approve")
    def wf_approve(
        body: dict = Body(),
        x_actor: str | None = Header(default=None),
    ) -> Response:
        cfg.require_role(x_actor, "coordinator")
        approval_id = _field(body, "approval_id")
        approve = body.get("approve", True)
        if not isinstance(approve, bool):
            raise ValidationError("approve must be true or false", field="approve")
        if approve:
            outcome = engine.approve(approval_id, actor=x_actor)
            payload = {"approval_id": approval_id, "status": "approved", "result": outcome}
        else:
            engine.reject(approval_id, actor=x_actor)
            payload = {"approval_id": approval_id, "status": "rejected"}
        _audit(x_actor, "wf.approve", f"approval:{approval_id}")
        return _json(payload)

    return app


def serve(config: ServiceConfig) -> None:
    """Blocking entry point used by the CLI."""
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="info")
