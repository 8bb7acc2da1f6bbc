"""Transactional store and audio blob store.

`Database.session()` is the single write path: the block either commits
as a whole or rolls back, which is what every service operation leans on
for its check-then-write atomicity. `state_digest` fingerprints the full
observable state (rows + blobs) so tests can prove a denied request
mutated nothing.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Iterator

from sqlalchemy import create_engine, event, select
from sqlalchemy.orm import Session
from sqlalchemy.pool import StaticPool

from .errors import ERR_IN_USE, ERR_NOT_FOUND, ServiceError
from .models import Assignment, Base, Label, Project, SegmentSelection, User


class Database:
    def __init__(self, url: str, *, echo: bool = False):
        kwargs: dict = {"echo": echo}
        if url.startswith("sqlite"):
            kwargs["connect_args"] = {"check_same_thread": False, "timeout": 30}
            if ":memory:" in url or url == "sqlite://":
                kwargs["poolclass"] = StaticPool
        self.engine = create_engine(url, **kwargs)
        if url.startswith("sqlite"):
            event.listen(self.engine, "connect", _enable_sqlite_fks)
        Base.metadata.create_all(self.engine)

    @contextmanager
    def session(self) -> Iterator[Session]:
        """Commit on clean exit, roll back on any exception."""
        s = Session(self.engine)
        try:
            yield s
            s.commit()
        except BaseException:
            s.rollback()
            raise
        finally:
            s.close()

    # -- deletion helpers with referential guards ------------------------

    def delete_user(self, user_id: int) -> None:
        """Remove a user; forbidden while any assignment references them."""
        with self.session() as s:
            user = s.get(User, user_id)
            if user is None:
                raise ServiceError(ERR_NOT_FOUND, f"no user {user_id}")
            in_use = s.execute(
                select(Assignment.id).where(Assignment.user_id == user_id).limit(1)
            ).first()
            if in_use:
                raise ServiceError(ERR_IN_USE, "user has assignments")
            s.delete(user)

    def delete_label(self, label_id: int) -> None:
        """Remove a label; forbidden while any segment selection uses it."""
        with self.session() as s:
            label = s.get(Label, label_id)
            if label is None:
                raise ServiceError(ERR_NOT_FOUND, f"no label {label_id}")
            in_use = s.execute(
                select(SegmentSelection.segment_id)
                .where(SegmentSelection.label_id == label_id)
                .limit(1)
            ).first()
            if in_use:
                raise ServiceError(ERR_IN_USE, "label referenced by segments")
            s.delete(label)

    def delete_project(self, project_id: int) -> None:
        """Remove a project; the schema cascades to all owned rows."""
        with self.session() as s:
            project = s.get(Project, project_id)
            if project is None:
                raise ServiceError(ERR_NOT_FOUND, f"no project {project_id}")
            s.delete(project)

    # -- state fingerprint ----------------------------------------------

    def state_digest(self, blobs: "BlobStore | None" = None) -> str:
        """SHA-256 over every table row (ordered) plus the blob listing."""
        snapshot: dict = {}
        with Session(self.engine) as s:
            for table in Base.metadata.sorted_tables:
                rows = s.execute(
                    select(table).order_by(*table.primary_key.columns)
                ).all()
                snapshot[table.name] = [
                    [_plain(v) for v in row] for row in rows
                ]
        if blobs is not None:
            snapshot["__blobs__"] = blobs.listing()
        payload = json.dumps(snapshot, ensure_ascii=False, sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _plain(value):
    if isinstance(value, datetime):
        return value.isoformat()
    return value


def _enable_sqlite_fks(dbapi_conn, _record):
    cur = dbapi_conn.cursor()
    cur.execute("PRAGMA foreign_keys=ON")
    cur.close()


class BlobStore:
    """Flat directory of audio files keyed by stored name.

    Writes go through a temp file + rename so a blob is either fully
    present or absent; `discard` lets the ingest path undo a blob whose
    database transaction failed to commit.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, stored_name: str) -> Path:
        if "/" in stored_name or "\\" in stored_name or ".." in stored_name:
            raise ValueError(f"unsafe stored name: {stored_name!r}")
        return self.root / stored_name

    def put(self, stored_name: str, data: bytes) -> None:
        path = self._path(stored_name)
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".partial-")
        try:
            with os.fdopen(fd, "wb") as f:
                f.write(data)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def get(self, stored_name: str) -> bytes:
        path = self._path(stored_name)
        if not path.is_file():
            raise ServiceError(ERR_NOT_FOUND)
        return path.read_bytes()

    def size(self, stored_name: str) -> int:
        path = self._path(stored_name)
        if not path.is_file():
            raise ServiceError(ERR_NOT_FOUND)
        return path.stat().st_size

    def exists(self, stored_name: str) -> bool:
        return self._path(stored_name).is_file()

    def discard(self, stored_name: str) -> None:
        path = self._path(stored_name)
        if path.is_file():
            path.unlink()

    def names(self) -> list[str]:
        return sorted(
            p.name for p in self.root.iterdir()
            if p.is_file() and not p.name.startswith(".partial-")
        )

    def listing(self) -> list[list[str]]:
        """(name, content hash) pairs; part of the state digest."""
        out = []
        for name in self.names():
            digest = hashlib.sha256(self._path(name).read_bytes()).hexdigest()
            out.append([name, digest])
        return out
