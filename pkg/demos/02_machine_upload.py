"""
Machine ingestion with pre-annotations
======================================

A speech pipeline authenticates with the project API key — no user
session — and uploads audio together with a rough machine transcript.
Each assignee receives an editable copy of the pre-annotation.
"""

import json

from common import ADMIN, fresh_service, login, silence_wav

client = fresh_service()
admin = login(client, ADMIN["username"], ADMIN["password"])

project = client.post(
    "/projects", json={"name": "Dictation Batch 7"}, headers=admin
).json()
for name in ("asha", "bruno"):
    user = client.post(
        "/users",
        json={"username": name, "password": f"{name}-password", "role": "annotator"},
        headers=admin,
    ).json()
    client.post(
        f"/projects/{project['id']}/users",
        json={"user_id": user["id"]},
        headers=admin,
    )
label = client.post(
    f"/projects/{project['id']}/labels",
    json={"name": "confidence", "selection_type": "single"},
    headers=admin,
).json()
for value in ("high", "low"):
    client.post(f"/labels/{label['id']}/values", json={"value": value}, headers=admin)

# ---- the pipeline's side starts here -----------------------------------
# one five-second clip, a reference transcript, and one machine segment
machine_segment = [{
    "start_ms": 400,
    "end_ms": 2600,
    "transcription": "patient reports mild headache",
    "labels": {"confidence": ["low"]},
}]
reply = client.post(
    "/api/data",
    headers={"Authorization": project["api_key"]},
    files={"audio_file": ("visit-031.wav", silence_wav(5000), "audio/wav")},
    data={
        "original_filename": "visit-031.wav",
        "reference_transcription": "patient reports mild headache since tuesday",
        "segmentations": json.dumps(machine_segment),
        "assigned_users": json.dumps(["asha", "bruno"]),
    },
)
print("upload reply:", json.dumps(reply.json(), indent=2))

# the server renamed the file: the public URL never leaks the original name
stored = reply.json()["stored_name"]
print(f"\nstored as {stored!r} — served at /audio/{stored}")

# ---- and what the annotators see ---------------------------------------
for name in ("asha", "bruno"):
    session = login(client, name, f"{name}-password")
    page = client.get(
        f"/projects/{project['id']}/data",
        params={"category": "pending"},
        headers=session,
    ).json()
    item = page["items"][0]
    detail = client.get(f"/data/{item['datapoint_id']}", headers=session).json()
    seg = detail["segments"][0]
    print(
        f"{name}: 1 pending item, pre-filled segment "
        f"[{seg['start_ms']}, {seg['end_ms']}) {seg['transcription']!r}"
    )

# a wrong key is rejected without revealing whether the project exists
bad = client.post(
    "/api/data",
    headers={"Authorization": "0" * 64},
    files={"audio_file": ("x.wav", silence_wav(500), "audio/wav")},
    data={"original_filename": "x.wav", "assigned_users": "[]"},
)
print("\nwrong key:", bad.status_code, bad.json())
