"""HTTP surface: one FastAPI app wiring every service module.

`create_app` builds a fully configured application; `app_factory` is the
uvicorn entry point (`uvicorn audio_annotator.api:app_factory --factory`).

Error bodies are `{"error": CODE}` plus an optional human `detail`;
codes map to HTTP status here and nowhere else. Endpoints that must not
leak existence (login, token check, machine ingest auth, audio
delivery) raise their codes without detail, so denial bodies are
byte-identical across causes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from fastapi import Depends, FastAPI, File, Form, Request, Response, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import errors, qa
from .admin import AdminService
from .annotation import AnnotationService
from .auth import AuthService, Principal
from .config import AppConfig
from .errors import ServiceError
from .export import export_json
from .ingest import IngestService
from .media import MediaService, parse_range
from .models import Project
from .store import BlobStore, Database

_STATUS = {
    errors.ERR_UNAUTHENTICATED: 401,
    errors.ERR_BAD_CREDENTIALS: 401,
    errors.ERR_BAD_API_KEY: 401,
    errors.ERR_FORBIDDEN: 403,
    errors.ERR_NOT_FOUND: 404,
    errors.ERR_CONFLICT: 409,
    errors.ERR_IN_USE: 409,
    errors.ERR_LAST_ADMIN: 409,
    errors.ERR_TOO_LARGE: 413,
    errors.ERR_RANGE: 416,
}
_DEFAULT_STATUS = 400  # validation-style codes


@dataclass
class AppContext:
    config: AppConfig
    db: Database
    blobs: BlobStore
    auth: AuthService
    admin: AdminService
    annotation: AnnotationService
    ingest: IngestService
    media: MediaService


def create_app(config: AppConfig | None = None) -> FastAPI:
    config = config or AppConfig()
    db = Database(config.database_url)
    blobs = BlobStore(config.storage_dir)
    auth = AuthService(db, config)
    ctx = AppContext(
        config=config,
        db=db,
        blobs=blobs,
        auth=auth,
        admin=AdminService(db, config),
        annotation=AnnotationService(db, config),
        ingest=IngestService(db, blobs, config),
        media=MediaService(db, blobs),
    )
    if config.admin_username and config.admin_password:
        auth.bootstrap_admin(config.admin_username, config.admin_password)

    app = FastAPI(title="audio-annotator", docs_url=None, redoc_url=None)
    app.state.ctx = ctx
    _register_handlers(app)
    _register_routes(app)
    if config.frontend_dir is not None:
        # Catch-all static mount for the built browser UI. Registered
        # last, so every API route above keeps precedence.
        app.mount("/", StaticFiles(directory=config.frontend_dir, html=True))
    return app


def app_factory() -> FastAPI:
    return create_app(AppConfig.from_env())


# -- plumbing -------------------------------------------------------------

def _ctx(request: Request) -> AppContext:
    return request.app.state.ctx


def _bearer_token(request: Request) -> str:
    header = request.headers.get("authorization")
    if header is None or not header.startswith("Bearer "):
        raise ServiceError(errors.ERR_UNAUTHENTICATED)
    return header[len("Bearer "):]


def _principal(request: Request) -> Principal:
    return _ctx(request).auth.verify(_bearer_token(request))


def _error_response(exc: ServiceError) -> JSONResponse:
    body: dict = {"error": exc.code}
    headers = {}
    if exc.code == errors.ERR_RANGE:
        # detail carries the Content-Range advertisement for 416 replies
        headers["Content-Range"] = exc.detail
    elif exc.detail:
        body["detail"] = exc.detail
    return JSONResponse(
        status_code=_STATUS.get(exc.code, _DEFAULT_STATUS),
        content=body,
        headers=headers,
    )


def _register_handlers(app: FastAPI) -> None:
    @app.exception_handler(ServiceError)
    async def _on_service_error(request: Request, exc: ServiceError):
        return _error_response(exc)

    @app.exception_handler(RequestValidationError)
    async def _on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": errors.ERR_VALIDATION})


def _json_field(raw: str, field: str) -> object:
    try:
        return json.loads(raw)
    except ValueError:
        raise ServiceError(
            errors.ERR_VALIDATION, f"{field} is not valid JSON"
        ) from None


# -- request bodies -------------------------------------------------------

class LoginBody(BaseModel):
    username: str
    password: str


class CreateUserBody(BaseModel):
    username: str
    password: str
    role: str


class RolePatch(BaseModel):
    role: str


class ProjectBody(BaseModel):
    name: str


class MembershipBody(BaseModel):
    user_id: int


class LabelBody(BaseModel):
    name: str
    selection_type: str


class LabelValueBody(BaseModel):
    value: str


class SegmentBody(BaseModel):
    start_ms: int
    end_ms: int
    transcription: str = ""
    labels: dict[str, list[int]] = {}


class SegmentPatch(BaseModel):
    start_ms: int | None = None
    end_ms: int | None = None
    transcription: str | None = None
    labels: dict[str, list[int]] | None = None


class AssignmentPatch(BaseModel):
    status: str | None = None
    marked_for_review: bool | None = None


class PlanBody(BaseModel):
    datapoint_ids: list[int]
    annotators: list[str]
    overlap_fraction: float
    seed: int = 0


# -- routes ---------------------------------------------------------------

def _register_routes(app: FastAPI) -> None:

    # -- sessions --------------------------------------------------------

    @app.post("/auth/login")
    def login(body: LoginBody, request: Request):
        return _ctx(request).auth.login(body.username, body.password)

    @app.delete("/auth/logout", status_code=204)
    def logout(request: Request):
        _ctx(request).auth.logout(_bearer_token(request))
        return Response(status_code=204)

    # -- user management -------------------------------------------------

    @app.post("/users", status_code=201)
    def create_user(
        body: CreateUserBody,
        request: Request,
        principal: Principal = Depends(_principal),
    ):
        ctx = _ctx(request)
        ctx.auth.require_admin(principal)
        return ctx.admin.create_user(body.username, body.password, body.role)

    @app.get("/users")
    def list_users(request: Request, principal: Principal = Depends(_principal)):
        ctx = _ctx(request)
        ctx.auth.require_admin(principal)
        return ctx.admin.list_users()

    @app.patch("/users/{user_id}")
    def update_user_role(
        user_id: int,
        body: RolePatch,
        request: Request,
        principal: Principal = Depends(_principal),
    ):
        ctx = _ctx(request)
        ctx.auth.require_admin(principal)
        return ctx.admin.update_user_role(user_id, body.role)

    @app.delete("/users/{user_id}", status_code=204)
    def delete_user(
        user_id: int,
        request: Request,
        principal: Principal = Depends(_principal),
    ):
        ctx = _ctx(request)
        ctx.auth.require_admin(principal)
        ctx.admin.delete_user(user_id)
        return Response(status_code=204)

    # -- projects --------------------------------------------------------

    @app.post("/projects", status_code=201)
    def create_project(
        body: ProjectBody,
        request: Request,
        principal: Principal = Depends(_principal),
    ):
        ctx = _ctx(request)
        ctx.auth.require_admin(principal)
        return ctx.admin.create_project(body.name)

    @app.get("/projects")
    def list_projects(request: Request, principal: Principal = Depends(_principal)):
        return _ctx(request).annotation.list_projects(principal)

    @app.patch("/projects/{project_id}")
    def rename_project(
        project_id: int,
        body: ProjectBody,
        request: Request,
        principal: Principal = Depends(_principal),
    ):
        ctx = _ctx(request)
        ctx.auth.require_admin(principal)
        return ctx.admin.rename_project(project_id, body.name)

    @app.delete("/projects/{project_id}", status_code=204)
    def delete_project(
        project_id: int,
        request: Request,
        principal: Principal = Depends(_principal),
    ):
        ctx = _ctx(request)
        ctx.auth.require_admin(principal)
        ctx.admin.delete_project(project_id)
        return Response(status_code=204)

    @app.post("/projects/{project_id}/users", status_code=201)
    def add_member(
        project_id: int,
        body: MembershipBody,
        request: Request,
        principal: Principal = Depends(_principal),
    ):
        ctx = _ctx(request)
        ctx.auth.require_admin(principal)
        return ctx.admin.assign_user_to_project(body.user_id, project_id)

    @app.post("/projects/{project_id}/labels", status_code=201)
    def create_label(
        project_id: int,
        body: LabelBody,
        request: Request,
        principal: Principal = Depends(_principal),
    ):
        ctx = _ctx(request)
        ctx.auth.require_admin(principal)
        return ctx.admin.create_label(project_id, body.name, body.selection_type)

    @app.post("/labels/{label_id}/values", status_code=201)
    def create_label_value(
        label_id: int,
        body: LabelValueBody,
        request: Request,
        principal: Principal = Depends(_principal),
    ):
        ctx = _ctx(request)
        ctx.auth.require_admin(principal)
        return ctx.admin.create_label_value(label_id, body.value)

    @app.delete("/labels/{label_id}", status_code=204)
    def delete_label(
        label_id: int,
        request: Request,
        principal: Principal = Depends(_principal),
    ):
        ctx = _ctx(request)
        ctx.auth.require_admin(principal)
        ctx.admin.delete_label(label_id)
        return Response(status_code=204)

    @app.post("/projects/{project_id}/api_key")
    def regenerate_api_key(
        project_id: int,
        request: Request,
        principal: Principal = Depends(_principal),
    ):
        ctx = _ctx(request)
        ctx.auth.require_admin(principal)
        return ctx.admin.regenerate_api_key(project_id)

    # -- machine ingestion -----------------------------------------------

    @app.post("/api/data", status_code=201)
    async def ingest_data(
        request: Request,
        audio_file: UploadFile = File(...),
        original_filename: str = Form(...),
        reference_transcription: str | None = Form(None),
        segmentations: str | None = Form(None),
        assigned_users: str = Form(...),
        is_marked_for_review: bool = Form(False),
    ):
        ctx = _ctx(request)
        api_key = request.headers.get("authorization")
        if not api_key:
            raise ServiceError(errors.ERR_BAD_API_KEY)
        audio = await audio_file.read()

        users = _json_field(assigned_users, "assigned_users")
        if not isinstance(users, list) or not all(
            isinstance(u, str) for u in users
        ):
            raise ServiceError(
                errors.ERR_VALIDATION, "assigned_users must be an array of usernames"
            )
        pre = None
        if segmentations is not None:
            pre = _json_field(segmentations, "segmentations")
            if not isinstance(pre, list):
                raise ServiceError(
                    errors.ERR_VALIDATION, "segmentations must be an array"
                )

        return ctx.ingest.ingest_datapoint(
            api_key,
            original_filename,
            audio,
            reference_transcription=reference_transcription,
            pre_annotations=pre,
            assignees=users,
            marked_for_review=is_marked_for_review,
        )

    # -- annotator workflow ----------------------------------------------

    @app.get("/projects/{project_id}/data")
    def list_datapoints(
        project_id: int,
        request: Request,
        category: str = "all",
        page: int = 1,
        page_size: int | None = None,
        principal: Principal = Depends(_principal),
    ):
        return _ctx(request).annotation.list_datapoints(
            principal, project_id, category=category, page=page, page_size=page_size
        )

    @app.get("/data/{datapoint_id}")
    def get_datapoint(
        datapoint_id: int,
        request: Request,
        principal: Principal = Depends(_principal),
    ):
        return _ctx(request).annotation.get_datapoint(principal, datapoint_id)

    @app.post("/data/{datapoint_id}/segments", status_code=201)
    def create_segment(
        datapoint_id: int,
        body: SegmentBody,
        request: Request,
        principal: Principal = Depends(_principal),
    ):
        return _ctx(request).annotation.create_segment(
            principal,
            datapoint_id,
            body.start_ms,
            body.end_ms,
            transcription=body.transcription,
            selections=body.labels,
        )

    @app.patch("/segments/{segment_id}")
    def update_segment(
        segment_id: int,
        body: SegmentPatch,
        request: Request,
        principal: Principal = Depends(_principal),
    ):
        return _ctx(request).annotation.update_segment(
            principal,
            segment_id,
            start_ms=body.start_ms,
            end_ms=body.end_ms,
            transcription=body.transcription,
            selections=body.labels,
        )

    @app.delete("/segments/{segment_id}", status_code=204)
    def delete_segment(
        segment_id: int,
        request: Request,
        principal: Principal = Depends(_principal),
    ):
        _ctx(request).annotation.delete_segment(principal, segment_id)
        return Response(status_code=204)

    @app.patch("/data/{datapoint_id}")
    def patch_assignment(
        datapoint_id: int,
        body: AssignmentPatch,
        request: Request,
        principal: Principal = Depends(_principal),
    ):
        ctx = _ctx(request)
        if body.status is None and body.marked_for_review is None:
            raise ServiceError(
                errors.ERR_VALIDATION,
                "provide status and/or marked_for_review",
            )
        view = None
        if body.status is not None:
            view = ctx.annotation.set_completion(principal, datapoint_id, body.status)
        if body.marked_for_review is not None:
            view = ctx.annotation.set_review_flag(
                principal, datapoint_id, body.marked_for_review
            )
        return view

    # -- audio delivery --------------------------------------------------

    @app.get("/audio/{stored_name}")
    def serve_audio(
        stored_name: str,
        request: Request,
        principal: Principal = Depends(_principal),
    ):
        data, content_type = _ctx(request).media.resolve(principal, stored_name)
        size = len(data)
        byte_range = parse_range(request.headers.get("range"), size)
        headers = {"Accept-Ranges": "bytes"}
        if byte_range is None:
            return Response(content=data, media_type=content_type, headers=headers)
        start, end = byte_range
        headers["Content-Range"] = f"bytes {start}-{end}/{size}"
        return Response(
            content=data[start:end + 1],
            status_code=206,
            media_type=content_type,
            headers=headers,
        )

    # -- export + quality ------------------------------------------------

    @app.get("/projects/{project_id}/export")
    def export_project(
        project_id: int,
        request: Request,
        principal: Principal = Depends(_principal),
    ):
        ctx = _ctx(request)
        ctx.auth.require_admin(principal)
        document = export_json(ctx.db, project_id)
        return Response(
            content=document,
            media_type="application/json",
            headers={
                "Content-Disposition": (
                    f'attachment; filename="project-{project_id}-export.json"'
                )
            },
        )

    @app.get("/projects/{project_id}/qa/wer")
    def qa_wer(
        project_id: int,
        user_a: str,
        user_b: str,
        request: Request,
        threshold: float | None = None,
        principal: Principal = Depends(_principal),
    ):
        ctx = _ctx(request)
        ctx.auth.require_admin(principal)
        if threshold is None:
            threshold = ctx.config.wer_threshold_default
        return qa.build_report(
            ctx.db, ctx.config.clock, project_id, user_a, user_b, threshold=threshold
        )

    @app.post("/projects/{project_id}/qa/plan")
    def qa_plan(
        project_id: int,
        body: PlanBody,
        request: Request,
        principal: Principal = Depends(_principal),
    ):
        ctx = _ctx(request)
        ctx.auth.require_admin(principal)
        with ctx.db.session() as s:
            if s.get(Project, project_id) is None:
                raise ServiceError(errors.ERR_NOT_FOUND, f"no project {project_id}")
        try:
            plan = qa.plan_overlap(
                body.datapoint_ids,
                body.annotators,
                body.overlap_fraction,
                seed=body.seed,
            )
        except ValueError as exc:
            raise ServiceError(errors.ERR_VALIDATION, str(exc)) from None
        return {
            "shared": plan.shared,
            "a_only": plan.a_only,
            "b_only": plan.b_only,
        }
