"""Entity-level validation rules shared by the annotation and ingestion paths.

All stored text passes through `normalize_text` (NFC), so uniqueness and
equality are plain byte comparisons afterwards. Segment validation checks
rules in a fixed order and reports the first violation: bounds, interval,
label scope, cardinality.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

from sqlalchemy import select
from sqlalchemy.orm import Session

from .errors import (
    ERR_BOUNDS,
    ERR_CARDINALITY,
    ERR_EMPTY_INTERVAL,
    ERR_INVALID_ENCODING,
    ERR_LABEL_SCOPE,
    ServiceError,
)
from .models import Label, LabelValue

# segment selections, normalized: label id -> set of chosen value ids
Selections = dict[int, set[int]]


def normalize_text(s: str) -> str:
    """NFC-normalize; rejects strings that are not valid Unicode text
    (e.g. surrogates smuggled in via surrogateescape decoding)."""
    if not isinstance(s, str):
        raise TypeError(f"expected str, got {type(s).__name__}")
    try:
        s.encode("utf-8")
    except UnicodeEncodeError as exc:
        raise ServiceError(ERR_INVALID_ENCODING, str(exc)) from exc
    return unicodedata.normalize("NFC", s)


@dataclass(frozen=True)
class LabelInfo:
    label_id: int
    name: str
    selection_type: str  # "single" | "multi"
    value_ids: frozenset[int]
    value_names: dict[int, str]


@dataclass(frozen=True)
class ProjectSchema:
    """Snapshot of one project's labels, the unit validation works against."""

    project_id: int
    labels: dict[int, LabelInfo]

    def label_by_name(self, name: str) -> LabelInfo | None:
        for info in self.labels.values():
            if info.name == name:
                return info
        return None


def load_schema(session: Session, project_id: int) -> ProjectSchema:
    labels: dict[int, LabelInfo] = {}
    rows = session.execute(
        select(Label).where(Label.project_id == project_id).order_by(Label.id)
    ).scalars()
    for label in rows:
        values = session.execute(
            select(LabelValue).where(LabelValue.label_id == label.id)
        ).scalars().all()
        labels[label.id] = LabelInfo(
            label_id=label.id,
            name=label.name,
            selection_type=label.selection_type,
            value_ids=frozenset(v.id for v in values),
            value_names={v.id: v.value for v in values},
        )
    return ProjectSchema(project_id=project_id, labels=labels)


def validate_label_selection(selections: Selections, schema: ProjectSchema) -> None:
    """Scope then cardinality; empty selections are always fine."""
    for label_id, value_ids in selections.items():
        info = schema.labels.get(label_id)
        if info is None:
            raise ServiceError(ERR_LABEL_SCOPE, f"label {label_id} not in project")
        for value_id in value_ids:
            if value_id not in info.value_ids:
                raise ServiceError(
                    ERR_LABEL_SCOPE,
                    f"value {value_id} does not belong to label {label_id}",
                )
    for label_id, value_ids in selections.items():
        info = schema.labels[label_id]
        if info.selection_type == "single" and len(value_ids) != 1:
            raise ServiceError(
                ERR_CARDINALITY,
                f"single-choice label {label_id} needs exactly one value, "
                f"got {len(value_ids)}",
            )


def validate_segment(
    start_ms: int,
    end_ms: int,
    selections: Selections,
    duration_ms: int,
    schema: ProjectSchema,
) -> None:
    """Accept iff all segment invariants hold; raise the first violation."""
    if start_ms < 0 or start_ms > duration_ms or end_ms < 0 or end_ms > duration_ms:
        raise ServiceError(
            ERR_BOUNDS,
            f"[{start_ms}, {end_ms}) outside [0, {duration_ms}]",
        )
    if start_ms >= end_ms:
        raise ServiceError(ERR_EMPTY_INTERVAL, f"start {start_ms} >= end {end_ms}")
    validate_label_selection(selections, schema)


def normalize_selections(raw: dict) -> Selections:
    """Wire shape {label_id: [value_id, ...]} -> {int: set[int]}.

    Labels mapped to an empty list are treated as unselected."""
    out: Selections = {}
    for key, values in raw.items():
        label_id = int(key)
        ids = {int(v) for v in values}
        if ids:
            out[label_id] = ids
    return out
