"""
An annotator's workday
======================

Log in, walk the pending queue, draw segments, fix one, flag a clip
for review, and mark work complete. Shows how the dashboard
categories move as the flags change.
"""

import json

from common import ADMIN, fresh_service, login, silence_wav

client = fresh_service()
admin = login(client, ADMIN["username"], ADMIN["password"])

# setup: one project, one annotator, three clips
project = client.post(
    "/projects", json={"name": "Interviews"}, headers=admin
).json()
user = client.post(
    "/users",
    json={"username": "asha", "password": "asha-password", "role": "annotator"},
    headers=admin,
).json()
client.post(
    f"/projects/{project['id']}/users", json={"user_id": user["id"]}, headers=admin
)
speaker = client.post(
    f"/projects/{project['id']}/labels",
    json={"name": "speaker", "selection_type": "single"},
    headers=admin,
).json()
values = {}
for value in ("interviewer", "guest"):
    v = client.post(
        f"/labels/{speaker['id']}/values", json={"value": value}, headers=admin
    ).json()
    values[value] = v["id"]
for i in range(3):
    client.post(
        "/api/data",
        headers={"Authorization": project["api_key"]},
        files={"audio_file": (f"take-{i}.wav", silence_wav(4000), "audio/wav")},
        data={
            "original_filename": f"take-{i}.wav",
            "assigned_users": json.dumps(["asha"]),
        },
    )

# ---- asha's session ----------------------------------------------------
asha = login(client, "asha", "asha-password")


def show_queue(note):
    counts = {}
    for category in ("pending", "completed", "marked_review"):
        page = client.get(
            f"/projects/{project['id']}/data",
            params={"category": category},
            headers=asha,
        ).json()
        counts[category] = page["total"]
    print(f"{note}: {counts}")


show_queue("start of day")

queue = client.get(
    f"/projects/{project['id']}/data",
    params={"category": "pending"},
    headers=asha,
).json()["items"]
first = queue[0]["datapoint_id"]

# two segments on the first clip; the guest one gets a wrong end time
client.post(
    f"/data/{first}/segments",
    json={
        "start_ms": 0, "end_ms": 1500,
        "transcription": "so, tell us about the project",
        "labels": {str(speaker["id"]): [values["interviewer"]]},
    },
    headers=asha,
)
sloppy = client.post(
    f"/data/{first}/segments",
    json={
        "start_ms": 1500, "end_ms": 3999,
        "transcription": "well it began as a weekend experiment",
        "labels": {str(speaker["id"]): [values["guest"]]},
    },
    headers=asha,
).json()

# listening again: the guest stops at 3.2 s — shrink the segment
fixed = client.patch(
    f"/segments/{sloppy['id']}", json={"end_ms": 3200}, headers=asha
).json()
print(f"fixed segment ends at {fixed['end_ms']} ms")

# invalid edits are refused with a specific error, nothing is stored
bad = client.patch(
    f"/segments/{sloppy['id']}", json={"end_ms": 99_000}, headers=asha
)
print("out-of-bounds edit:", bad.status_code, bad.json()["error"])

# done with this clip
client.patch(f"/data/{first}", json={"status": "completed"}, headers=asha)
show_queue("after finishing one")

# the second clip sounds clipped — flag it for a second pass
second = queue[1]["datapoint_id"]
client.patch(f"/data/{second}", json={"marked_for_review": True}, headers=asha)
show_queue("after flagging one")
