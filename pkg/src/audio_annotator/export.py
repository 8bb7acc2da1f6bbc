"""Deterministic JSON export of one project's full annotation state.

The document layout and its orderings are fixed so that exporting twice
with no intervening writes yields byte-identical output: datapoints by
(created_at, id), assignments by username, segments by (start, end,
id), label values lexicographically. Labels and values appear by name —
never by internal id — and no credentials or API keys are included.
"""

from __future__ import annotations

import json

from sqlalchemy import select

from .errors import ERR_NOT_FOUND, ServiceError
from .models import (
    Assignment,
    DataPoint,
    Label,
    LabelValue,
    Project,
    Segment,
    SegmentSelection,
    User,
)
from .store import Database


def build_export(db: Database, project_id: int) -> dict:
    with db.session() as s:
        project = s.get(Project, project_id)
        if project is None:
            raise ServiceError(ERR_NOT_FOUND, f"no project {project_id}")

        labels = s.execute(
            select(Label).where(Label.project_id == project_id)
        ).scalars().all()
        label_names = {lb.id: lb.name for lb in labels}
        value_names: dict[int, str] = {}
        for lb in labels:
            for v in s.execute(
                select(LabelValue).where(LabelValue.label_id == lb.id)
            ).scalars():
                value_names[v.id] = v.value

        label_docs = [
            {
                "name": lb.name,
                "type": lb.selection_type,
                "values": sorted(
                    v.value
                    for v in s.execute(
                        select(LabelValue).where(LabelValue.label_id == lb.id)
                    ).scalars()
                ),
            }
            for lb in sorted(labels, key=lambda lb: lb.name)
        ]

        datapoints = s.execute(
            select(DataPoint)
            .where(DataPoint.project_id == project_id)
            .order_by(DataPoint.created_at, DataPoint.id)
        ).scalars().all()

        data_docs = []
        for dp in datapoints:
            rows = s.execute(
                select(Assignment, User.username)
                .join(User, Assignment.user_id == User.id)
                .where(Assignment.datapoint_id == dp.id)
                .order_by(User.username)
            ).all()
            assignment_docs = []
            for assignment, username in rows:
                segments = s.execute(
                    select(Segment)
                    .where(Segment.assignment_id == assignment.id)
                    .order_by(Segment.start_ms, Segment.end_ms, Segment.id)
                ).scalars().all()
                segment_docs = []
                for seg in segments:
                    selections = s.execute(
                        select(SegmentSelection).where(
                            SegmentSelection.segment_id == seg.id
                        )
                    ).scalars().all()
                    by_label: dict[str, list[str]] = {}
                    for sel in selections:
                        by_label.setdefault(label_names[sel.label_id], []).append(
                            value_names[sel.label_value_id]
                        )
                    segment_docs.append(
                        {
                            "start_ms": seg.start_ms,
                            "end_ms": seg.end_ms,
                            "transcription": seg.transcription,
                            "labels": {
                                name: sorted(by_label[name])
                                for name in sorted(by_label)
                            },
                        }
                    )
                assignment_docs.append(
                    {
                        "username": username,
                        "status": assignment.status,
                        "marked_for_review": assignment.marked_for_review,
                        "segments": segment_docs,
                    }
                )
            data_docs.append(
                {
                    "original_filename": dp.original_filename,
                    "stored_name": dp.stored_name,
                    "format": dp.format,
                    "duration_ms": dp.duration_ms,
                    "reference_transcription": dp.reference_transcription,
                    "assignments": assignment_docs,
                }
            )

        return {
            "version": "1",
            "project": {"id": project.id, "name": project.name},
            "labels": label_docs,
            "data": data_docs,
        }


def export_json(db: Database, project_id: int) -> str:
    """Canonical serialization: 2-space indent, raw Unicode, newline-terminated."""
    doc = build_export(db, project_id)
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
