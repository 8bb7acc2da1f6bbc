"""Accounts, sessions, and authorization.

Bearer tokens are RFC 7519 JWTs (HS256) carrying {token_id, user_id,
role, exp}; the server keeps its own expiring registry of token ids so
logout revokes immediately regardless of the signed expiry. Password
digests use scrypt with a per-user random salt; parameters ride along in
the digest string, so verification never depends on current config.
"""

from __future__ import annotations

import base64
import hashlib
import hmac
import json
import secrets
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta

from sqlalchemy import func, select

from .clock import Clock, to_iso, to_storage
from .config import AppConfig
from .domain import normalize_text
from .errors import (
    ERR_BAD_CREDENTIALS,
    ERR_CONFLICT,
    ERR_FORBIDDEN,
    ERR_UNAUTHENTICATED,
    ERR_WEAK_PASSWORD,
    ServiceError,
)
from .models import Assignment, Membership, User
from .store import Database

MIN_PASSWORD_LENGTH = 8


# -- password digests ----------------------------------------------------

def hash_password(password: str, *, n: int = 2**14, r: int = 8, p: int = 1) -> str:
    salt = secrets.token_bytes(16)
    digest = hashlib.scrypt(
        password.encode("utf-8"), salt=salt, n=n, r=r, p=p, dklen=32
    )
    return f"scrypt${n}${r}${p}${salt.hex()}${digest.hex()}"


def verify_password(password: str, stored: str) -> bool:
    try:
        scheme, n, r, p, salt_hex, digest_hex = stored.split("$")
        if scheme != "scrypt":
            return False
        digest = hashlib.scrypt(
            password.encode("utf-8"),
            salt=bytes.fromhex(salt_hex),
            n=int(n), r=int(r), p=int(p),
            dklen=32,
        )
    except (ValueError, TypeError):
        return False
    return hmac.compare_digest(digest.hex(), digest_hex)


# -- JWT (HS256, compact serialization) ----------------------------------

def _b64url(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode("ascii")


def _b64url_decode(part: str) -> bytes:
    pad = "=" * (-len(part) % 4)
    return base64.urlsafe_b64decode(part + pad)


def encode_jwt(claims: dict, secret: str) -> str:
    header = _b64url(json.dumps({"alg": "HS256", "typ": "JWT"}).encode())
    payload = _b64url(json.dumps(claims, separators=(",", ":")).encode())
    signing_input = f"{header}.{payload}".encode("ascii")
    sig = hmac.new(secret.encode("utf-8"), signing_input, hashlib.sha256).digest()
    return f"{header}.{payload}.{_b64url(sig)}"


def decode_jwt(token: str, secret: str) -> dict | None:
    """Signature-checked claims, or None for any malformed/forged token."""
    try:
        header, payload, sig = token.split(".")
        signing_input = f"{header}.{payload}".encode("ascii")
        expected = hmac.new(
            secret.encode("utf-8"), signing_input, hashlib.sha256
        ).digest()
        if not hmac.compare_digest(expected, _b64url_decode(sig)):
            return None
        head = json.loads(_b64url_decode(header))
        if head.get("alg") != "HS256":
            return None
        claims = json.loads(_b64url_decode(payload))
        if not isinstance(claims, dict):
            return None
        return claims
    except (ValueError, UnicodeDecodeError):
        return None


# -- server-side session registry ----------------------------------------

class TokenStore:
    """Expiring token-id registry; all methods are thread-safe."""

    def __init__(self, clock: Clock):
        self._clock = clock
        self._lock = threading.Lock()
        self._entries: dict[str, tuple[int, datetime]] = {}

    def put(self, token_id: str, user_id: int, expires_at: datetime) -> None:
        with self._lock:
            self._entries[token_id] = (user_id, expires_at)

    def lookup(self, token_id: str) -> tuple[int, datetime] | None:
        """Live entry or None; expired entries are dropped on sight."""
        now = self._clock()
        with self._lock:
            entry = self._entries.get(token_id)
            if entry is None:
                return None
            if now >= entry[1]:
                del self._entries[token_id]
                return None
            return entry

    def remove(self, token_id: str) -> bool:
        with self._lock:
            return self._entries.pop(token_id, None) is not None

    def purge_expired(self) -> int:
        now = self._clock()
        with self._lock:
            dead = [k for k, (_, exp) in self._entries.items() if now >= exp]
            for k in dead:
                del self._entries[k]
            return len(dead)


# -- principal + authorization -------------------------------------------

@dataclass(frozen=True)
class Principal:
    user_id: int
    role: str

    @property
    def is_admin(self) -> bool:
        return self.role == "admin"


class AuthService:
    def __init__(self, db: Database, config: AppConfig):
        self.db = db
        self.config = config
        self.tokens = TokenStore(config.clock)

    # -- account bootstrap ------------------------------------------------

    def bootstrap_admin(self, username: str, password: str) -> dict:
        """First-startup admin creation; a no-op when the same admin
        username already exists."""
        username = normalize_text(username)
        with self.db.session() as s:
            existing = s.execute(
                select(User).where(User.username == username)
            ).scalar_one_or_none()
            if existing is not None:
                if existing.role == "admin":
                    return _user_payload(existing)
                raise ServiceError(
                    ERR_CONFLICT, f"{username!r} exists with role annotator"
                )
            if len(password) < MIN_PASSWORD_LENGTH:
                raise ServiceError(
                    ERR_WEAK_PASSWORD,
                    f"password must be at least {MIN_PASSWORD_LENGTH} characters",
                )
            user = User(
                username=username,
                credential_digest=hash_password(
                    password,
                    n=self.config.scrypt_n,
                    r=self.config.scrypt_r,
                    p=self.config.scrypt_p,
                ),
                role="admin",
                created_at=to_storage(self.config.clock()),
            )
            s.add(user)
            s.flush()
            return _user_payload(user)

    # -- sessions ---------------------------------------------------------

    def login(self, username: str, password: str) -> dict:
        """Issue a bearer token; unknown user and wrong password fail
        identically (no username oracle)."""
        username = normalize_text(username)
        with self.db.session() as s:
            user = s.execute(
                select(User).where(User.username == username)
            ).scalar_one_or_none()
            if user is None or not verify_password(password, user.credential_digest):
                raise ServiceError(ERR_BAD_CREDENTIALS)
            user_id, role = user.id, user.role

        now = self.config.clock()
        expires_at = now + timedelta(seconds=self.config.token_ttl_seconds)
        token_id = secrets.token_hex(16)
        token = encode_jwt(
            {
                "token_id": token_id,
                "user_id": user_id,
                "role": role,
                "exp": int(expires_at.timestamp()),
            },
            self.config.token_secret,
        )
        self.tokens.put(token_id, user_id, expires_at)
        return {"token": token, "expires_at": to_iso(expires_at)}

    def verify(self, token: str) -> Principal:
        """Signature valid AND token id registered AND not expired;
        any failure is the same ERR_UNAUTHENTICATED."""
        claims = decode_jwt(token, self.config.token_secret)
        if claims is None:
            raise ServiceError(ERR_UNAUTHENTICATED)
        token_id = claims.get("token_id")
        if not isinstance(token_id, str):
            raise ServiceError(ERR_UNAUTHENTICATED)
        entry = self.tokens.lookup(token_id)
        if entry is None:
            raise ServiceError(ERR_UNAUTHENTICATED)
        user_id = entry[0]
        # Role is re-read so a role change takes effect on the next request.
        with self.db.session() as s:
            user = s.get(User, user_id)
            if user is None:
                raise ServiceError(ERR_UNAUTHENTICATED)
            return Principal(user_id=user.id, role=user.role)

    def logout(self, token: str) -> None:
        claims = decode_jwt(token, self.config.token_secret)
        if claims is None:
            raise ServiceError(ERR_UNAUTHENTICATED)
        token_id = claims.get("token_id")
        if not isinstance(token_id, str) or not self.tokens.remove(token_id):
            raise ServiceError(ERR_UNAUTHENTICATED)

    # -- authorization ----------------------------------------------------

    def require_admin(self, principal: Principal) -> None:
        if not principal.is_admin:
            raise ServiceError(ERR_FORBIDDEN)

    def require_member(self, principal: Principal, project_id: int) -> None:
        """Project-scoped access; admins pass every project check."""
        if principal.is_admin:
            return
        with self.db.session() as s:
            row = s.get(Membership, (principal.user_id, project_id))
        if row is None:
            raise ServiceError(ERR_FORBIDDEN)

    def require_assignee(self, principal: Principal, datapoint_id: int) -> None:
        if principal.is_admin:
            return
        with self.db.session() as s:
            row = s.execute(
                select(Assignment.id).where(
                    Assignment.datapoint_id == datapoint_id,
                    Assignment.user_id == principal.user_id,
                )
            ).first()
        if row is None:
            raise ServiceError(ERR_FORBIDDEN)


def _user_payload(user: User) -> dict:
    return {
        "id": user.id,
        "username": user.username,
        "role": user.role,
        "created_at": to_iso(user.created_at),
    }


def admin_count(db: Database) -> int:
    with db.session() as s:
        return s.execute(
            select(func.count()).select_from(User).where(User.role == "admin")
        ).scalar_one()
