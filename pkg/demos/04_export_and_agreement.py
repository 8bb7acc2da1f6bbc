"""
Export and inter-annotator agreement
====================================

Two annotators transcribe the same clip; the admin pulls the project
export, a word-error-rate report comparing them, and an overlap plan
for the next batch.
"""

import json

from common import ADMIN, fresh_service, login, silence_wav

client = fresh_service()
admin = login(client, ADMIN["username"], ADMIN["password"])

project = client.post(
    "/projects", json={"name": "Agreement Study"}, headers=admin
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
upload = client.post(
    "/api/data",
    headers={"Authorization": project["api_key"]},
    files={"audio_file": ("shared.wav", silence_wav(3000), "audio/wav")},
    data={
        "original_filename": "shared.wav",
        "assigned_users": json.dumps(["asha", "bruno"]),
    },
).json()

# both hear the same audio, write slightly different transcripts
transcripts = {
    "asha": "the quick brown fox jumps over the lazy dog",
    "bruno": "the quick brown fox jumped over a lazy dog",
}
for name, text in transcripts.items():
    session = login(client, name, f"{name}-password")
    client.post(
        f"/data/{upload['id']}/segments",
        json={"start_ms": 0, "end_ms": 2900, "transcription": text},
        headers=session,
    )

# ---- the quality report ------------------------------------------------
report = client.get(
    f"/projects/{project['id']}/qa/wer",
    params={"user_a": "asha", "user_b": "bruno", "threshold": 0.15},
    headers=admin,
).json()
for row in report["rows"]:
    flag = " <-- needs a look" if row["flagged"] else ""
    print(f"{row['original_filename']}: wer={row['wer']:.3f}{flag}")

# ---- planning the next batch with 30% deliberate overlap ---------------
plan = client.post(
    f"/projects/{project['id']}/qa/plan",
    json={
        "datapoint_ids": list(range(101, 121)),
        "annotators": ["asha", "bruno"],
        "overlap_fraction": 0.3,
        "seed": 11,
    },
    headers=admin,
).json()
print(f"\nnext batch: {len(plan['shared'])} clips go to both,", end=" ")
print(f"{len(plan['a_only'])} to asha only, {len(plan['b_only'])} to bruno only")

# ---- the export document ----------------------------------------------
export = client.get(f"/projects/{project['id']}/export", headers=admin)
print("\nexport (deterministic — run it twice, diff it, nothing changes):")
print(export.text)
