"""Application configuration."""

from __future__ import annotations

import os
import secrets
from dataclasses import dataclass, field
from pathlib import Path

from .clock import Clock, utc_now


@dataclass
class AppConfig:
    """All tunables in one place; `create_app` consumes an instance.

    Defaults suit a single-node deployment. Tests override the clock,
    scrypt cost (speed) and upload cap.
    """

    database_url: str = "sqlite:///annotator.db"
    storage_dir: str | Path = "audio_store"

    # Bearer-token signing secret. Generated per process when unset,
    # which invalidates sessions on restart; set it for real deployments.
    token_secret: str = field(default_factory=lambda: secrets.token_hex(32))
    token_ttl_seconds: int = 24 * 60 * 60

    max_upload_bytes: int = 200 * 1024 * 1024

    page_size_default: int = 10
    page_size_max: int = 100

    # scrypt cost parameters; verification re-reads them from each digest,
    # so changing them never invalidates stored credentials.
    scrypt_n: int = 2**14
    scrypt_r: int = 8
    scrypt_p: int = 1

    wer_threshold_default: float = 0.5

    # Directory with a built browser UI (index.html + assets). When set,
    # it is served from "/" on the same origin as the API; the REST
    # routes keep precedence. Unset means API-only.
    frontend_dir: str | Path | None = None

    # First-startup admin account; both must be set for bootstrap to run.
    admin_username: str | None = None
    admin_password: str | None = None

    clock: Clock = utc_now

    @classmethod
    def from_env(cls, prefix: str = "ANNOTATOR_") -> "AppConfig":
        """Build a config from environment variables (used by the uvicorn
        factory). Unset variables keep their defaults."""
        cfg = cls()
        env = os.environ
        if v := env.get(prefix + "DATABASE_URL"):
            cfg.database_url = v
        if v := env.get(prefix + "STORAGE_DIR"):
            cfg.storage_dir = v
        if v := env.get(prefix + "TOKEN_SECRET"):
            cfg.token_secret = v
        if v := env.get(prefix + "TOKEN_TTL_SECONDS"):
            cfg.token_ttl_seconds = int(v)
        if v := env.get(prefix + "MAX_UPLOAD_BYTES"):
            cfg.max_upload_bytes = int(v)
        if v := env.get(prefix + "FRONTEND_DIR"):
            cfg.frontend_dir = v
        if v := env.get(prefix + "ADMIN_USERNAME"):
            cfg.admin_username = v
        if v := env.get(prefix + "ADMIN_PASSWORD"):
            cfg.admin_password = v
        return cfg
