"""Shared scaffolding for the demo scripts: an in-process service and a
throwaway WAV generator, so every demo runs with zero external setup."""

import io
import struct
import tempfile
import wave

from fastapi.testclient import TestClient

from audio_annotator.api import create_app
from audio_annotator.config import AppConfig

ADMIN = {"username": "admin", "password": "demo-admin-pw"}


def fresh_service() -> TestClient:
    """A complete service instance backed by throwaway storage."""
    workdir = tempfile.mkdtemp(prefix="annotator-demo-")
    config = AppConfig(
        database_url=f"sqlite:///{workdir}/annotator.db",
        storage_dir=f"{workdir}/audio",
        admin_username=ADMIN["username"],
        admin_password=ADMIN["password"],
        # light password hashing: these accounts live for one script run
        scrypt_n=16, scrypt_r=2, scrypt_p=1,
    )
    return TestClient(create_app(config))


def login(client: TestClient, username: str, password: str) -> dict:
    reply = client.post(
        "/auth/login", json={"username": username, "password": password}
    )
    reply.raise_for_status()
    return {"Authorization": f"Bearer {reply.json()['token']}"}


def silence_wav(duration_ms: int, sample_rate: int = 8000) -> bytes:
    """Mono 16-bit silence of the requested length."""
    n = duration_ms * sample_rate // 1000
    buffer = io.BytesIO()
    with wave.open(buffer, "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(sample_rate)
        w.writeframes(struct.pack(f"<{n}h", *([0] * n)))
    return buffer.getvalue()
