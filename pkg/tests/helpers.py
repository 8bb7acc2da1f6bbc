"""Small request helpers shared across test modules."""

from __future__ import annotations


def login(client, username: str, password: str) -> dict:
    """Authenticate and return ready-to-use request headers."""
    r = client.post(
        "/auth/login", json={"username": username, "password": password}
    )
    assert r.status_code == 200, r.text
    return {"Authorization": f"Bearer {r.json()['token']}"}


def make_project(client, admin_headers, name: str) -> dict:
    r = client.post("/projects", json={"name": name}, headers=admin_headers)
    assert r.status_code == 201, r.text
    return r.json()


def make_user(
    client, admin_headers, username: str, password: str = "password-1", role="annotator"
) -> dict:
    r = client.post(
        "/users",
        json={"username": username, "password": password, "role": role},
        headers=admin_headers,
    )
    assert r.status_code == 201, r.text
    return r.json()


def add_member(client, admin_headers, project_id: int, user_id: int) -> None:
    r = client.post(
        f"/projects/{project_id}/users",
        json={"user_id": user_id},
        headers=admin_headers,
    )
    assert r.status_code == 201, r.text


def make_label(
    client, admin_headers, project_id: int, name: str, selection_type: str,
    values: list[str] = (),
) -> dict:
    r = client.post(
        f"/projects/{project_id}/labels",
        json={"name": name, "selection_type": selection_type},
        headers=admin_headers,
    )
    assert r.status_code == 201, r.text
    label = r.json()
    label["value_ids"] = {}
    for value in values:
        rv = client.post(
            f"/labels/{label['id']}/values",
            json={"value": value},
            headers=admin_headers,
        )
        assert rv.status_code == 201, rv.text
        label["value_ids"][value] = rv.json()["id"]
    return label


def ingest(
    client,
    api_key: str,
    audio: bytes,
    filename: str = "clip.wav",
    assignees: list[str] = (),
    **fields,
) -> dict:
    import json as _json

    data = {
        "original_filename": filename,
        "assigned_users": _json.dumps(list(assignees)),
    }
    for key, value in fields.items():
        data[key] = value
    r = client.post(
        "/api/data",
        headers={"Authorization": api_key},
        files={"audio_file": (filename, audio, "application/octet-stream")},
        data=data,
    )
    assert r.status_code == 201, r.text
    return r.json()
