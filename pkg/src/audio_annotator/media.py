"""Authorized audio delivery with HTTP range support.

Unauthorized requests for a stored name — whether or not such a file
exists — resolve to the same not-found error, so URL guessing cannot
confirm that an audio exists. Range handling follows HTTP semantics:
one satisfiable range gets a 206 slice, a syntactically invalid or
multi-part Range header is ignored (full 200 body), and an
unsatisfiable one is a 416.
"""

from __future__ import annotations

import re

from sqlalchemy import select

from .auth import Principal
from .errors import ERR_NOT_FOUND, ERR_RANGE, ServiceError
from .models import Assignment, DataPoint
from .store import BlobStore, Database

CONTENT_TYPES = {"wav": "audio/wav", "mp3": "audio/mpeg", "ogg": "audio/ogg"}

_RANGE_RE = re.compile(r"^bytes=(\d*)-(\d*)$")


class MediaService:
    def __init__(self, db: Database, blobs: BlobStore):
        self.db = db
        self.blobs = blobs

    def resolve(self, principal: Principal, stored_name: str) -> tuple[bytes, str]:
        """Audio bytes + content type, or a deliberately opaque not-found."""
        denied = ServiceError(ERR_NOT_FOUND)
        with self.db.session() as s:
            datapoint = s.execute(
                select(DataPoint).where(DataPoint.stored_name == stored_name)
            ).scalar_one_or_none()
            if datapoint is None:
                raise denied
            if not principal.is_admin:
                assigned = s.execute(
                    select(Assignment.id).where(
                        Assignment.datapoint_id == datapoint.id,
                        Assignment.user_id == principal.user_id,
                    )
                ).first()
                if assigned is None:
                    raise denied
            fmt = datapoint.format
        try:
            data = self.blobs.get(stored_name)
        except ServiceError:
            raise denied from None
        return data, CONTENT_TYPES[fmt]


def parse_range(header: str | None, size: int) -> tuple[int, int] | None:
    """One (start, end) inclusive pair, None to ignore the header, or
    ERR_RANGE for a syntactically valid but unsatisfiable request."""
    if header is None:
        return None
    match = _RANGE_RE.match(header.strip())
    if match is None:
        # multi-range or malformed: serve the full body instead
        return None
    first, last = match.groups()
    if first == "" and last == "":
        return None
    if first == "":
        # suffix form: last N bytes
        n = int(last)
        if n == 0:
            raise ServiceError(ERR_RANGE, f"bytes */{size}")
        return max(size - n, 0), size - 1
    start = int(first)
    if start >= size:
        raise ServiceError(ERR_RANGE, f"bytes */{size}")
    if last == "":
        return start, size - 1
    end = int(last)
    if end < start:
        return None
    return start, min(end, size - 1)
