"""Annotator-facing operations: project and datapoint listings, segment
CRUD, review and completion flags.

Visibility rules, applied uniformly:

* Listings show the caller's own assignments only; admins can read any
  datapoint but see no segments they don't own.
* Segment writes require the caller's own assignment row — role does
  not override authorship, so admins editing others' work get
  ERR_FORBIDDEN.
* A datapoint id that exists but isn't assigned to the caller is
  ERR_FORBIDDEN; for non-admins an id that doesn't exist at all answers
  the same way, so probing ids reveals nothing.
"""

from __future__ import annotations

from sqlalchemy import func, select
from sqlalchemy.orm import Session

from .auth import Principal
from .clock import to_iso, to_storage
from .config import AppConfig
from .domain import (
    Selections,
    load_schema,
    normalize_selections,
    normalize_text,
    validate_segment,
)
from .errors import (
    ERR_BAD_PAGE,
    ERR_FORBIDDEN,
    ERR_NOT_FOUND,
    ERR_VALIDATION,
    ServiceError,
)
from .models import (
    ASSIGNMENT_STATUSES,
    Assignment,
    DataPoint,
    Membership,
    Project,
    Segment,
    SegmentSelection,
)
from .store import Database

CATEGORIES = ("all", "pending", "completed", "marked_review")


class AnnotationService:
    def __init__(self, db: Database, config: AppConfig):
        self.db = db
        self.config = config

    # -- listings ---------------------------------------------------------

    def list_projects(self, principal: Principal) -> list[dict]:
        with self.db.session() as s:
            if principal.is_admin:
                projects = s.execute(
                    select(Project).order_by(Project.id)
                ).scalars().all()
                # the api_key is admin-only material
                return [
                    {
                        "id": p.id,
                        "name": p.name,
                        "api_key": p.api_key,
                        "created_at": to_iso(p.created_at),
                    }
                    for p in projects
                ]
            projects = s.execute(
                select(Project)
                .join(Membership, Membership.project_id == Project.id)
                .where(Membership.user_id == principal.user_id)
                .order_by(Project.id)
            ).scalars().all()
            return [
                {"id": p.id, "name": p.name, "created_at": to_iso(p.created_at)}
                for p in projects
            ]

    def list_datapoints(
        self,
        principal: Principal,
        project_id: int,
        category: str = "all",
        page: int = 1,
        page_size: int | None = None,
    ) -> dict:
        if category not in CATEGORIES:
            raise ServiceError(
                ERR_VALIDATION, f"category must be one of {CATEGORIES}"
            )
        if page_size is None:
            page_size = self.config.page_size_default
        if page < 1 or page_size < 1 or page_size > self.config.page_size_max:
            raise ServiceError(
                ERR_BAD_PAGE,
                f"page must be >= 1 and page_size in "
                f"[1, {self.config.page_size_max}]",
            )
        with self.db.session() as s:
            self._check_project_access(s, principal, project_id)
            query = (
                select(Assignment, DataPoint)
                .join(DataPoint, Assignment.datapoint_id == DataPoint.id)
                .where(
                    DataPoint.project_id == project_id,
                    Assignment.user_id == principal.user_id,
                )
            )
            if category in ("pending", "completed"):
                query = query.where(Assignment.status == category)
            elif category == "marked_review":
                query = query.where(Assignment.marked_for_review.is_(True))
            total = s.execute(
                select(func.count()).select_from(query.subquery())
            ).scalar_one()
            rows = s.execute(
                query.order_by(DataPoint.created_at, DataPoint.id)
                .offset((page - 1) * page_size)
                .limit(page_size)
            ).all()
            items = [
                {
                    "datapoint_id": dp.id,
                    "assignment_id": a.id,
                    "original_filename": dp.original_filename,
                    "stored_name": dp.stored_name,
                    "format": dp.format,
                    "duration_ms": dp.duration_ms,
                    "status": a.status,
                    "marked_for_review": a.marked_for_review,
                }
                for a, dp in rows
            ]
        return {
            "items": items,
            "total": total,
            "page": page,
            "page_size": page_size,
        }

    def get_datapoint(self, principal: Principal, datapoint_id: int) -> dict:
        with self.db.session() as s:
            datapoint, assignment = self._fetch_readable(
                s, principal, datapoint_id
            )
            schema_rows = self._schema_view(s, datapoint.project_id)
            segments = []
            if assignment is not None:
                segments = [
                    _segment_view(seg)
                    for seg in _own_segments(s, assignment.id)
                ]
            return {
                "id": datapoint.id,
                "project_id": datapoint.project_id,
                "original_filename": datapoint.original_filename,
                "stored_name": datapoint.stored_name,
                "audio_url": f"/audio/{datapoint.stored_name}",
                "format": datapoint.format,
                "duration_ms": datapoint.duration_ms,
                "reference_transcription": datapoint.reference_transcription,
                "labels": schema_rows,
                "assignment": None
                if assignment is None
                else {
                    "id": assignment.id,
                    "status": assignment.status,
                    "marked_for_review": assignment.marked_for_review,
                },
                "segments": segments,
            }

    # -- segment CRUD -----------------------------------------------------

    def create_segment(
        self,
        principal: Principal,
        datapoint_id: int,
        start_ms: int,
        end_ms: int,
        transcription: str = "",
        selections: dict | None = None,
    ) -> dict:
        transcription = normalize_text(transcription)
        normalized = normalize_selections(selections or {})
        with self.db.session() as s:
            datapoint, assignment = self._fetch_owned(s, principal, datapoint_id)
            schema = load_schema(s, datapoint.project_id)
            validate_segment(
                start_ms, end_ms, normalized, datapoint.duration_ms, schema
            )
            now = to_storage(self.config.clock())
            segment = Segment(
                assignment_id=assignment.id,
                start_ms=start_ms,
                end_ms=end_ms,
                transcription=transcription,
                created_at=now,
                updated_at=now,
            )
            s.add(segment)
            s.flush()
            _write_selections(s, segment.id, normalized)
            s.flush()
            s.refresh(segment)
            return _segment_view(segment)

    def update_segment(
        self,
        principal: Principal,
        segment_id: int,
        *,
        start_ms: int | None = None,
        end_ms: int | None = None,
        transcription: str | None = None,
        selections: dict | None = None,
    ) -> dict:
        with self.db.session() as s:
            segment, datapoint = self._fetch_own_segment(s, principal, segment_id)
            new_start = segment.start_ms if start_ms is None else start_ms
            new_end = segment.end_ms if end_ms is None else end_ms
            if selections is None:
                new_selections = _selections_of(segment)
            else:
                new_selections = normalize_selections(selections)
            schema = load_schema(s, datapoint.project_id)
            validate_segment(
                new_start, new_end, new_selections, datapoint.duration_ms, schema
            )
            segment.start_ms = new_start
            segment.end_ms = new_end
            if transcription is not None:
                segment.transcription = normalize_text(transcription)
            if selections is not None:
                for row in list(segment.selections):
                    s.delete(row)
                s.flush()
                _write_selections(s, segment.id, new_selections)
            segment.updated_at = to_storage(self.config.clock())
            s.flush()
            s.refresh(segment)
            return _segment_view(segment)

    def delete_segment(self, principal: Principal, segment_id: int) -> None:
        with self.db.session() as s:
            segment, _ = self._fetch_own_segment(s, principal, segment_id)
            s.delete(segment)

    # -- assignment state -------------------------------------------------

    def set_review_flag(
        self, principal: Principal, datapoint_id: int, flag: bool
    ) -> dict:
        with self.db.session() as s:
            _, assignment = self._fetch_owned(s, principal, datapoint_id)
            assignment.marked_for_review = bool(flag)
            assignment.updated_at = to_storage(self.config.clock())
            s.flush()
            return _assignment_view(assignment)

    def set_completion(
        self, principal: Principal, datapoint_id: int, status: str
    ) -> dict:
        if status not in ASSIGNMENT_STATUSES:
            raise ServiceError(
                ERR_VALIDATION, f"status must be one of {ASSIGNMENT_STATUSES}"
            )
        with self.db.session() as s:
            _, assignment = self._fetch_owned(s, principal, datapoint_id)
            assignment.status = status
            assignment.updated_at = to_storage(self.config.clock())
            s.flush()
            return _assignment_view(assignment)

    # -- lookup helpers ---------------------------------------------------

    def _check_project_access(
        self, s: Session, principal: Principal, project_id: int
    ) -> None:
        if principal.is_admin:
            if s.get(Project, project_id) is None:
                raise ServiceError(ERR_NOT_FOUND, f"no project {project_id}")
            return
        member = s.get(Membership, (principal.user_id, project_id))
        if member is None:
            raise ServiceError(ERR_FORBIDDEN)

    def _fetch_readable(
        self, s: Session, principal: Principal, datapoint_id: int
    ) -> tuple[DataPoint, Assignment | None]:
        """Datapoint plus the caller's assignment if any; admins may read
        without one."""
        datapoint = s.get(DataPoint, datapoint_id)
        if datapoint is None:
            if principal.is_admin:
                raise ServiceError(ERR_NOT_FOUND, f"no datapoint {datapoint_id}")
            raise ServiceError(ERR_FORBIDDEN)
        assignment = _own_assignment(s, datapoint_id, principal.user_id)
        if assignment is None and not principal.is_admin:
            raise ServiceError(ERR_FORBIDDEN)
        return datapoint, assignment

    def _fetch_owned(
        self, s: Session, principal: Principal, datapoint_id: int
    ) -> tuple[DataPoint, Assignment]:
        """Datapoint plus the caller's own assignment; no role override."""
        datapoint, assignment = self._fetch_readable(s, principal, datapoint_id)
        if assignment is None:
            raise ServiceError(ERR_FORBIDDEN)
        return datapoint, assignment

    def _fetch_own_segment(
        self, s: Session, principal: Principal, segment_id: int
    ) -> tuple[Segment, DataPoint]:
        segment = s.get(Segment, segment_id)
        if segment is None:
            raise ServiceError(ERR_NOT_FOUND, f"no segment {segment_id}")
        assignment = s.get(Assignment, segment.assignment_id)
        if assignment.user_id != principal.user_id:
            raise ServiceError(ERR_FORBIDDEN)
        datapoint = s.get(DataPoint, assignment.datapoint_id)
        return segment, datapoint

    def _schema_view(self, s: Session, project_id: int) -> list[dict]:
        schema = load_schema(s, project_id)
        rows = []
        for label_id in sorted(schema.labels):
            info = schema.labels[label_id]
            rows.append(
                {
                    "id": info.label_id,
                    "name": info.name,
                    "selection_type": info.selection_type,
                    "values": [
                        {"id": vid, "value": info.value_names[vid]}
                        for vid in sorted(info.value_ids)
                    ],
                }
            )
        return rows


def _own_assignment(
    s: Session, datapoint_id: int, user_id: int
) -> Assignment | None:
    return s.execute(
        select(Assignment).where(
            Assignment.datapoint_id == datapoint_id,
            Assignment.user_id == user_id,
        )
    ).scalar_one_or_none()


def _own_segments(s: Session, assignment_id: int) -> list[Segment]:
    return s.execute(
        select(Segment)
        .where(Segment.assignment_id == assignment_id)
        .order_by(Segment.start_ms, Segment.end_ms, Segment.id)
    ).scalars().all()


def _selections_of(segment: Segment) -> Selections:
    out: Selections = {}
    for row in segment.selections:
        out.setdefault(row.label_id, set()).add(row.label_value_id)
    return out


def _write_selections(s: Session, segment_id: int, selections: Selections) -> None:
    for label_id, value_ids in selections.items():
        for value_id in sorted(value_ids):
            s.add(
                SegmentSelection(
                    segment_id=segment_id,
                    label_id=label_id,
                    label_value_id=value_id,
                )
            )


def _segment_view(segment: Segment) -> dict:
    labels: dict[str, list[int]] = {}
    for row in segment.selections:
        labels.setdefault(str(row.label_id), []).append(row.label_value_id)
    for key in labels:
        labels[key].sort()
    return {
        "id": segment.id,
        "assignment_id": segment.assignment_id,
        "start_ms": segment.start_ms,
        "end_ms": segment.end_ms,
        "transcription": segment.transcription,
        "labels": {k: labels[k] for k in sorted(labels, key=int)},
        "created_at": to_iso(segment.created_at),
        "updated_at": to_iso(segment.updated_at),
    }


def _assignment_view(assignment: Assignment) -> dict:
    return {
        "id": assignment.id,
        "datapoint_id": assignment.datapoint_id,
        "user_id": assignment.user_id,
        "status": assignment.status,
        "marked_for_review": assignment.marked_for_review,
        "updated_at": to_iso(assignment.updated_at),
    }
