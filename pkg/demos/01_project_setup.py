"""
Setting up a project
====================

An administrator creates annotator accounts, a project, its label
schema, and hands out memberships. The printed API key is what a
speech pipeline would use to push audio into the project.
"""

from common import ADMIN, fresh_service, login

client = fresh_service()

# the bootstrap admin account comes from configuration
admin = login(client, ADMIN["username"], ADMIN["password"])

# two annotator accounts
for name in ("asha", "bruno"):
    user = client.post(
        "/users",
        json={"username": name, "password": f"{name}-password", "role": "annotator"},
        headers=admin,
    ).json()
    print(f"created user #{user['id']}: {user['username']} ({user['role']})")

# a project; the server mints its ingestion key
project = client.post(
    "/projects", json={"name": "Call Center Corpus"}, headers=admin
).json()
print(f"\nproject #{project['id']}: {project['name']}")
print(f"ingestion key: {project['api_key']}")

# membership controls who may ever see the project
for user_id in (2, 3):
    client.post(
        f"/projects/{project['id']}/users",
        json={"user_id": user_id},
        headers=admin,
    )

# the label schema: one single-choice dimension, one multi-choice
speaker = client.post(
    f"/projects/{project['id']}/labels",
    json={"name": "speaker", "selection_type": "single"},
    headers=admin,
).json()
for value in ("agent", "customer"):
    client.post(
        f"/labels/{speaker['id']}/values", json={"value": value}, headers=admin
    )

noise = client.post(
    f"/projects/{project['id']}/labels",
    json={"name": "background", "selection_type": "multi"},
    headers=admin,
).json()
for value in ("music", "crosstalk", "static"):
    client.post(
        f"/labels/{noise['id']}/values", json={"value": value}, headers=admin
    )

print("\nfinal roster as the admin sees it:")
for user in client.get("/users", headers=admin).json():
    print(f"  {user['username']:8} {user['role']}")

# annotators see their projects but never the ingestion key
asha = login(client, "asha", "asha-password")
print("\nasha's project list:", client.get("/projects", headers=asha).json())
