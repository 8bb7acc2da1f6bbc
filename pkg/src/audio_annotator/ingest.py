"""Key-authenticated datapoint ingestion.

`ingest_datapoint` is all-or-nothing: every check runs before the first
write, the database rows and the audio blob land inside one commit
window, and a commit failure rolls the blob back out. Pre-annotations
reference labels and values by name (an uploading pipeline can't know
internal ids) and are materialized as ordinary segments on every
created assignment.
"""

from __future__ import annotations

import secrets

from sqlalchemy import select

from .audioprobe import validate_audio
from .clock import to_storage
from .config import AppConfig
from .domain import (
    Selections,
    load_schema,
    normalize_text,
    validate_segment,
)
from .errors import (
    ERR_BAD_API_KEY,
    ERR_BAD_FORMAT,
    ERR_BAD_PREANNOTATION,
    ERR_NOT_MEMBER,
    ERR_UNKNOWN_ASSIGNEE,
    ServiceError,
)
from .models import (
    AUDIO_FORMATS,
    Assignment,
    DataPoint,
    Membership,
    Project,
    Segment,
    SegmentSelection,
    User,
)
from .store import BlobStore, Database


def generate_stored_name(extension: str) -> str:
    """Random 128-bit hex name; carries nothing of the original filename."""
    if extension not in AUDIO_FORMATS:
        raise ServiceError(ERR_BAD_FORMAT, f"unsupported extension {extension!r}")
    return f"{secrets.token_hex(16)}.{extension}"


class IngestService:
    def __init__(self, db: Database, blobs: BlobStore, config: AppConfig):
        self.db = db
        self.blobs = blobs
        self.config = config

    def ingest_datapoint(
        self,
        api_key: str,
        original_filename: str,
        audio: bytes,
        *,
        reference_transcription: str | None = None,
        pre_annotations: list[dict] | None = None,
        assignees: list[str] | None = None,
        marked_for_review: bool = False,
    ) -> dict:
        original_filename = normalize_text(original_filename)
        if reference_transcription is not None:
            reference_transcription = normalize_text(reference_transcription)

        with self.db.session() as s:
            project = s.execute(
                select(Project).where(Project.api_key == api_key)
            ).scalar_one_or_none()
            if project is None:
                # no detail: the error must not hint at near-miss keys
                raise ServiceError(ERR_BAD_API_KEY)
            project_id = project.id
            assignee_ids = _resolve_assignees(s, project_id, assignees or [])

        fmt, duration_ms = validate_audio(
            audio, max_bytes=self.config.max_upload_bytes
        )

        with self.db.session() as s:
            schema = load_schema(s, project_id)
        segment_drafts = _check_pre_annotations(
            pre_annotations or [], schema, duration_ms
        )

        stored_name = generate_stored_name(fmt)
        now = to_storage(self.config.clock())
        blob_written = False
        try:
            with self.db.session() as s:
                datapoint = DataPoint(
                    project_id=project_id,
                    original_filename=original_filename,
                    stored_name=stored_name,
                    format=fmt,
                    duration_ms=duration_ms,
                    reference_transcription=reference_transcription,
                    created_at=now,
                )
                s.add(datapoint)
                s.flush()
                assignment_views = []
                for user_id, username in assignee_ids:
                    assignment = Assignment(
                        datapoint_id=datapoint.id,
                        user_id=user_id,
                        status="pending",
                        marked_for_review=marked_for_review,
                        updated_at=now,
                    )
                    s.add(assignment)
                    s.flush()
                    for start_ms, end_ms, transcription, selections in segment_drafts:
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
                        for label_id, value_ids in selections.items():
                            for value_id in sorted(value_ids):
                                s.add(
                                    SegmentSelection(
                                        segment_id=segment.id,
                                        label_id=label_id,
                                        label_value_id=value_id,
                                    )
                                )
                    assignment_views.append(
                        {"id": assignment.id, "username": username, "status": "pending"}
                    )
                datapoint_id = datapoint.id
                # Blob lands before the commit that publishes its row; a
                # failed commit is undone in the except arm below.
                self.blobs.put(stored_name, audio)
                blob_written = True
        except BaseException:
            if blob_written:
                self.blobs.discard(stored_name)
            raise

        return {
            "id": datapoint_id,
            "project_id": project_id,
            "original_filename": original_filename,
            "stored_name": stored_name,
            "format": fmt,
            "duration_ms": duration_ms,
            "assignments": assignment_views,
        }


def _resolve_assignees(
    s, project_id: int, usernames: list[str]
) -> list[tuple[int, str]]:
    """Map usernames to user ids, requiring project membership.

    Duplicates collapse to one assignment."""
    out: list[tuple[int, str]] = []
    seen: set[str] = set()
    for raw in usernames:
        username = normalize_text(raw)
        if username in seen:
            continue
        seen.add(username)
        user = s.execute(
            select(User).where(User.username == username)
        ).scalar_one_or_none()
        if user is None:
            raise ServiceError(ERR_UNKNOWN_ASSIGNEE, f"no user {username!r}")
        member = s.get(Membership, (user.id, project_id))
        if member is None:
            raise ServiceError(
                ERR_NOT_MEMBER, f"{username!r} is not a member of the project"
            )
        out.append((user.id, username))
    return out


def _check_pre_annotations(
    entries: list, schema, duration_ms: int
) -> list[tuple[int, int, str, Selections]]:
    """Validate uploaded segments exactly as create_segment would,
    reporting the first offending entry by index."""
    drafts: list[tuple[int, int, str, Selections]] = []
    for i, entry in enumerate(entries):
        where = f"pre_annotations[{i}]"
        if not isinstance(entry, dict):
            raise ServiceError(ERR_BAD_PREANNOTATION, f"{where}: not an object")
        start_ms = entry.get("start_ms")
        end_ms = entry.get("end_ms")
        if not _is_int(start_ms) or not _is_int(end_ms):
            raise ServiceError(
                ERR_BAD_PREANNOTATION, f"{where}: start_ms/end_ms must be integers"
            )
        transcription = entry.get("transcription", "")
        if not isinstance(transcription, str):
            raise ServiceError(
                ERR_BAD_PREANNOTATION, f"{where}: transcription must be a string"
            )
        transcription = normalize_text(transcription)
        raw_labels = entry.get("labels", {})
        if not isinstance(raw_labels, dict):
            raise ServiceError(
                ERR_BAD_PREANNOTATION, f"{where}: labels must be an object"
            )
        selections: Selections = {}
        for label_name, values in raw_labels.items():
            info = schema.label_by_name(normalize_text(str(label_name)))
            if info is None:
                raise ServiceError(
                    ERR_BAD_PREANNOTATION, f"{where}: unknown label {label_name!r}"
                )
            if not isinstance(values, (list, tuple)):
                raise ServiceError(
                    ERR_BAD_PREANNOTATION,
                    f"{where}: values for {label_name!r} must be an array",
                )
            by_name = {name: vid for vid, name in info.value_names.items()}
            chosen: set[int] = set()
            for value in values:
                value_id = by_name.get(normalize_text(str(value)))
                if value_id is None:
                    raise ServiceError(
                        ERR_BAD_PREANNOTATION,
                        f"{where}: unknown value {value!r} for label {label_name!r}",
                    )
                chosen.add(value_id)
            if chosen:
                selections[info.label_id] = chosen
        try:
            validate_segment(start_ms, end_ms, selections, duration_ms, schema)
        except ServiceError as exc:
            raise ServiceError(
                ERR_BAD_PREANNOTATION, f"{where}: {exc.code}"
            ) from exc
        drafts.append((start_ms, end_ms, transcription, selections))
    return drafts


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)
