"""Inter-annotator quality pipeline.

Word error rate uses the standard unit-cost edit-distance recurrence:
WER = (substitutions + deletions + insertions) / reference length, so it
can exceed 1. Transcripts are the caller's segments in time order,
whitespace-joined; tokenization is NFC + casefold + Unicode-whitespace
split with punctuation kept (stripping rules are language-specific and
would silently change the rate).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Sequence

from sqlalchemy import select

from .clock import Clock, to_iso
from .domain import normalize_text
from .errors import (
    ERR_BAD_FRACTION,
    ERR_EMPTY_REFERENCE,
    ERR_NOT_FOUND,
    ServiceError,
)
from .models import Assignment, DataPoint, Project, Segment, User
from .store import Database


def tokenize(s: str, casefold: bool = True) -> list[str]:
    s = normalize_text(s)
    if casefold:
        s = s.casefold()
    return s.split()


def edit_distance(reference: Sequence[str], hypothesis: Sequence[str]) -> int:
    """Minimum substitutions + deletions + insertions turning reference
    into hypothesis (unit costs, two-row dynamic program)."""
    n, m = len(reference), len(hypothesis)
    prev = list(range(m + 1))
    for i in range(1, n + 1):
        cur = [i] + [0] * m
        r = reference[i - 1]
        for j in range(1, m + 1):
            sub = prev[j - 1] + (0 if r == hypothesis[j - 1] else 1)
            cur[j] = min(sub, prev[j] + 1, cur[j - 1] + 1)
        prev = cur
    return prev[m]


def word_error_rate(reference: Sequence[str], hypothesis: Sequence[str]) -> float:
    if not reference:
        raise ServiceError(ERR_EMPTY_REFERENCE, "reference token list is empty")
    return edit_distance(reference, hypothesis) / len(reference)


@dataclass(frozen=True)
class OverlapPlan:
    shared: list
    a_only: list
    b_only: list


def plan_overlap(
    datapoint_ids: Sequence,
    annotators: Sequence[str],
    overlap_fraction: float,
    seed: int = 0,
) -> OverlapPlan:
    """Partition datapoints into both-annotator and single-annotator sets.

    |shared| = ceil(p * n); the rest splits as evenly as possible with
    the extra item going to the first annotator. The shuffle is seeded,
    so a plan can be reproduced.
    """
    if not 0 <= overlap_fraction <= 1:
        raise ServiceError(
            ERR_BAD_FRACTION, f"overlap fraction {overlap_fraction} not in [0, 1]"
        )
    if not datapoint_ids:
        raise ValueError("datapoint_ids must be non-empty")
    if len(annotators) != 2:
        raise ValueError("exactly two annotators required")
    n = len(datapoint_ids)
    # Snap float fractions like 0.7 to their decimal intent before ceil;
    # raw binary floats would sporadically round 0.7 * 10 up to 8.
    shared_count = ceil(Fraction(overlap_fraction).limit_denominator(10**6) * n)
    shuffled = list(datapoint_ids)
    random.Random(seed).shuffle(shuffled)
    shared = shuffled[:shared_count]
    rest = shuffled[shared_count:]
    a_count = (len(rest) + 1) // 2
    return OverlapPlan(
        shared=shared, a_only=rest[:a_count], b_only=rest[a_count:]
    )


def assemble_transcript(db: Database, assignment_id: int) -> str:
    """Segment transcriptions in (start, end, id) order, single-space
    joined, empties skipped."""
    with db.session() as s:
        assignment = s.get(Assignment, assignment_id)
        if assignment is None:
            raise ServiceError(ERR_NOT_FOUND, f"no assignment {assignment_id}")
        segments = s.execute(
            select(Segment)
            .where(Segment.assignment_id == assignment_id)
            .order_by(Segment.start_ms, Segment.end_ms, Segment.id)
        ).scalars()
        parts = [seg.transcription for seg in segments if seg.transcription]
    return " ".join(parts)


def build_report(
    db: Database,
    clock: Clock,
    project_id: int,
    username_a: str,
    username_b: str,
    threshold: float = 0.5,
) -> dict:
    """Pairwise WER over every datapoint both users are assigned to,
    with annotator a as the reference. Rows where a's transcript has no
    tokens get wer=null and are flagged (unresolvable pair)."""
    with db.session() as s:
        if s.get(Project, project_id) is None:
            raise ServiceError(ERR_NOT_FOUND, f"no project {project_id}")
        user_a = s.execute(
            select(User).where(User.username == normalize_text(username_a))
        ).scalar_one_or_none()
        user_b = s.execute(
            select(User).where(User.username == normalize_text(username_b))
        ).scalar_one_or_none()
        if user_a is None or user_b is None:
            raise ServiceError(ERR_NOT_FOUND, "unknown annotator username")

        a_assignments = {
            row.datapoint_id: row.id
            for row in s.execute(
                select(Assignment)
                .join(DataPoint, Assignment.datapoint_id == DataPoint.id)
                .where(
                    DataPoint.project_id == project_id,
                    Assignment.user_id == user_a.id,
                )
            ).scalars()
        }
        b_assignments = {
            row.datapoint_id: row.id
            for row in s.execute(
                select(Assignment)
                .join(DataPoint, Assignment.datapoint_id == DataPoint.id)
                .where(
                    DataPoint.project_id == project_id,
                    Assignment.user_id == user_b.id,
                )
            ).scalars()
        }
        shared_ids = set(a_assignments) & set(b_assignments)
        datapoints = s.execute(
            select(DataPoint)
            .where(DataPoint.id.in_(shared_ids))
            .order_by(DataPoint.created_at, DataPoint.id)
        ).scalars().all()
        ordered = [(dp.id, dp.original_filename) for dp in datapoints]

    rows = []
    for datapoint_id, original_filename in ordered:
        ref = tokenize(assemble_transcript(db, a_assignments[datapoint_id]))
        hyp = tokenize(assemble_transcript(db, b_assignments[datapoint_id]))
        if not ref:
            wer, flagged = None, True
        else:
            wer = word_error_rate(ref, hyp)
            flagged = wer > threshold
        rows.append(
            {
                "datapoint_id": datapoint_id,
                "original_filename": original_filename,
                "wer": wer,
                "flagged": flagged,
            }
        )
    return {
        "project_id": project_id,
        "pair": [username_a, username_b],
        "rows": rows,
        "threshold": threshold,
        "generated_at": to_iso(clock()),
    }
