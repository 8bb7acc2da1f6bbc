import pytest
from fastapi.testclient import TestClient

from audio_annotator.api import create_app
from audio_annotator.clock import ManualClock
from audio_annotator.config import AppConfig

ADMIN_USER = "root"
ADMIN_PASSWORD = "root-password"


@pytest.fixture
def manual_clock():
    return ManualClock()


@pytest.fixture
def config(tmp_path, manual_clock):
    """File-backed store in a fresh directory, cheap scrypt, frozen clock."""
    return AppConfig(
        database_url=f"sqlite:///{tmp_path}/app.db",
        storage_dir=tmp_path / "audio",
        token_secret="test-secret",
        scrypt_n=16,
        scrypt_r=2,
        scrypt_p=1,
        clock=manual_clock,
        admin_username=ADMIN_USER,
        admin_password=ADMIN_PASSWORD,
    )


@pytest.fixture
def app(config):
    return create_app(config)


@pytest.fixture
def ctx(app):
    return app.state.ctx


@pytest.fixture
def client(app):
    return TestClient(app)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and report.when == "call":
        verdict = "PASS" if report.passed else "FAIL"
        reporter = item.config.pluginmanager.get_plugin("terminalreporter")
        if reporter is not None:
            reporter.write_line(f"[acceptance] {marker.args[0]}: {verdict}")
