"""Management operations: users, projects, memberships, label schemas, API keys.

All operations here assume the caller was already authorized as an
admin; the HTTP layer enforces that. Uniqueness conflicts surface from
the store's constraints inside the writing transaction (no racy
pre-checks) and are reported as ERR_CONFLICT.
"""

from __future__ import annotations

import secrets

from sqlalchemy import func, select
from sqlalchemy.exc import IntegrityError
from sqlalchemy.orm import Session

from .auth import MIN_PASSWORD_LENGTH, hash_password
from .clock import to_iso, to_storage
from .config import AppConfig
from .domain import normalize_text
from .errors import (
    ERR_CONFLICT,
    ERR_LAST_ADMIN,
    ERR_NOT_FOUND,
    ERR_VALIDATION,
    ERR_WEAK_PASSWORD,
    ServiceError,
)
from .models import (
    Label,
    LabelValue,
    Membership,
    Project,
    ROLES,
    SELECTION_TYPES,
    User,
)
from .store import Database


def _new_api_key() -> str:
    return secrets.token_hex(32)


class AdminService:
    def __init__(self, db: Database, config: AppConfig):
        self.db = db
        self.config = config

    # -- users ------------------------------------------------------------

    def create_user(self, username: str, password: str, role: str) -> dict:
        username = normalize_text(username)
        if not username:
            raise ServiceError(ERR_VALIDATION, "username must be non-empty")
        if role not in ROLES:
            raise ServiceError(ERR_VALIDATION, f"role must be one of {ROLES}")
        if len(password) < MIN_PASSWORD_LENGTH:
            raise ServiceError(
                ERR_WEAK_PASSWORD,
                f"password must be at least {MIN_PASSWORD_LENGTH} characters",
            )
        digest = hash_password(
            password,
            n=self.config.scrypt_n,
            r=self.config.scrypt_r,
            p=self.config.scrypt_p,
        )
        try:
            with self.db.session() as s:
                user = User(
                    username=username,
                    credential_digest=digest,
                    role=role,
                    created_at=to_storage(self.config.clock()),
                )
                s.add(user)
                s.flush()
                return _user_view(user)
        except IntegrityError:
            raise ServiceError(ERR_CONFLICT, f"username {username!r} taken") from None

    def list_users(self) -> list[dict]:
        with self.db.session() as s:
            users = s.execute(select(User).order_by(User.id)).scalars().all()
            return [_user_view(u) for u in users]

    def update_user_role(self, user_id: int, role: str) -> dict:
        if role not in ROLES:
            raise ServiceError(ERR_VALIDATION, f"role must be one of {ROLES}")
        with self.db.session() as s:
            user = s.get(User, user_id)
            if user is None:
                raise ServiceError(ERR_NOT_FOUND, f"no user {user_id}")
            if user.role == "admin" and role == "annotator":
                if _admin_count(s) <= 1:
                    raise ServiceError(
                        ERR_LAST_ADMIN, "cannot demote the only admin"
                    )
            user.role = role
            s.flush()
            return _user_view(user)

    def delete_user(self, user_id: int) -> None:
        with self.db.session() as s:
            user = s.get(User, user_id)
            if user is None:
                raise ServiceError(ERR_NOT_FOUND, f"no user {user_id}")
            if user.role == "admin" and _admin_count(s) <= 1:
                raise ServiceError(ERR_LAST_ADMIN, "cannot delete the only admin")
        self.db.delete_user(user_id)

    # -- projects ---------------------------------------------------------

    def create_project(self, name: str) -> dict:
        name = normalize_text(name)
        if not name:
            raise ServiceError(ERR_VALIDATION, "project name must be non-empty")
        try:
            with self.db.session() as s:
                project = Project(
                    name=name,
                    api_key=_new_api_key(),
                    created_at=to_storage(self.config.clock()),
                )
                s.add(project)
                s.flush()
                return _project_view(project, with_key=True)
        except IntegrityError:
            raise ServiceError(ERR_CONFLICT, f"project {name!r} exists") from None

    def rename_project(self, project_id: int, name: str) -> dict:
        name = normalize_text(name)
        if not name:
            raise ServiceError(ERR_VALIDATION, "project name must be non-empty")
        try:
            with self.db.session() as s:
                project = s.get(Project, project_id)
                if project is None:
                    raise ServiceError(ERR_NOT_FOUND, f"no project {project_id}")
                project.name = name
                s.flush()
                return _project_view(project, with_key=True)
        except IntegrityError:
            raise ServiceError(ERR_CONFLICT, f"project {name!r} exists") from None

    def delete_project(self, project_id: int) -> None:
        self.db.delete_project(project_id)

    def regenerate_api_key(self, project_id: int) -> dict:
        """Rotate the ingestion key; the old key stops working at commit."""
        with self.db.session() as s:
            project = s.get(Project, project_id)
            if project is None:
                raise ServiceError(ERR_NOT_FOUND, f"no project {project_id}")
            project.api_key = _new_api_key()
            s.flush()
            return _project_view(project, with_key=True)

    # -- memberships ------------------------------------------------------

    def assign_user_to_project(self, user_id: int, project_id: int) -> dict:
        with self.db.session() as s:
            if s.get(User, user_id) is None:
                raise ServiceError(ERR_NOT_FOUND, f"no user {user_id}")
            if s.get(Project, project_id) is None:
                raise ServiceError(ERR_NOT_FOUND, f"no project {project_id}")
            existing = s.get(Membership, (user_id, project_id))
            if existing is None:
                s.add(Membership(user_id=user_id, project_id=project_id))
            return {"user_id": user_id, "project_id": project_id}

    # -- label schema -----------------------------------------------------

    def create_label(self, project_id: int, name: str, selection_type: str) -> dict:
        name = normalize_text(name)
        if not name:
            raise ServiceError(ERR_VALIDATION, "label name must be non-empty")
        if selection_type not in SELECTION_TYPES:
            raise ServiceError(
                ERR_VALIDATION, f"selection_type must be one of {SELECTION_TYPES}"
            )
        try:
            with self.db.session() as s:
                if s.get(Project, project_id) is None:
                    raise ServiceError(ERR_NOT_FOUND, f"no project {project_id}")
                label = Label(
                    project_id=project_id, name=name, selection_type=selection_type
                )
                s.add(label)
                s.flush()
                return _label_view(label)
        except IntegrityError:
            raise ServiceError(
                ERR_CONFLICT, f"label {name!r} exists in project"
            ) from None

    def delete_label(self, label_id: int) -> None:
        self.db.delete_label(label_id)

    def create_label_value(self, label_id: int, value: str) -> dict:
        value = normalize_text(value)
        if not value:
            raise ServiceError(ERR_VALIDATION, "label value must be non-empty")
        try:
            with self.db.session() as s:
                if s.get(Label, label_id) is None:
                    raise ServiceError(ERR_NOT_FOUND, f"no label {label_id}")
                row = LabelValue(label_id=label_id, value=value)
                s.add(row)
                s.flush()
                return {"id": row.id, "label_id": label_id, "value": value}
        except IntegrityError:
            raise ServiceError(ERR_CONFLICT, f"value {value!r} exists") from None


def _admin_count(s: Session) -> int:
    return s.execute(
        select(func.count()).select_from(User).where(User.role == "admin")
    ).scalar_one()


def _user_view(user: User) -> dict:
    return {
        "id": user.id,
        "username": user.username,
        "role": user.role,
        "created_at": to_iso(user.created_at),
    }


def _project_view(project: Project, *, with_key: bool) -> dict:
    view = {
        "id": project.id,
        "name": project.name,
        "created_at": to_iso(project.created_at),
    }
    if with_key:
        view["api_key"] = project.api_key
    return view


def _label_view(label: Label) -> dict:
    return {
        "id": label.id,
        "project_id": label.project_id,
        "name": label.name,
        "selection_type": label.selection_type,
    }
