/**
 * Admin panel: user accounts, projects, label schemas, API keys, export
 * downloads, and the transcription-agreement report.
 */

import { ApiClient, ApiError } from "../api.js";
import { clear, el } from "../dom.js";
import { ProjectSummary, Role, UserView } from "../types.js";

function errText(err: unknown): string {
    if (err instanceof ApiError) return err.detail ? `${err.code} — ${err.detail}` : err.code;
    return String(err);
}

export async function renderAdmin(
    client: ApiClient,
    root: HTMLElement,
): Promise<void> {
    clear(root);
    const panel = el("section", { class: "admin-panel" }, el("h1", { text: "Administration" }));
    root.append(panel);

    const usersBox = el("div", { class: "admin-users" });
    const projectsBox = el("div", { class: "admin-projects" });
    panel.append(usersBox, projectsBox);

    await renderUsers(client, usersBox);
    await renderProjects(client, projectsBox);
}

async function renderUsers(client: ApiClient, box: HTMLElement): Promise<void> {
    clear(box);
    const users = await client.listUsers();
    const status = el("p", { class: "form-error", role: "alert" });

    const rows = el("ul", { class: "user-list" });
    for (const user of users) {
        rows.append(userRow(client, box, user, status));
    }

    const username = el("input", { name: "new-username", placeholder: "username" });
    const password = el("input", { name: "new-password", type: "password", placeholder: "password" });
    const role = el("select", { name: "new-role" },
        el("option", { value: "annotator", text: "annotator" }),
        el("option", { value: "admin", text: "admin" }),
    );
    const form = el(
        "form",
        {
            class: "create-user",
            onsubmit: async (event) => {
                event.preventDefault();
                status.textContent = "";
                try {
                    await client.createUser(username.value, password.value, role.value as Role);
                    await renderUsers(client, box);
                } catch (err) {
                    status.textContent = errText(err);
                }
            },
        },
        username, password, role,
        el("button", { type: "submit", text: "Add user" }),
    );

    box.append(el("h2", { text: "Users" }), rows, form, status);
}

function userRow(
    client: ApiClient,
    box: HTMLElement,
    user: UserView,
    status: HTMLElement,
): HTMLElement {
    return el(
        "li",
        { class: "user-row", "data-user-id": String(user.id) },
        `${user.username} — ${user.role} `,
        el("button", {
            class: "flip-role",
            text: user.role === "admin" ? "make annotator" : "make admin",
            onclick: async () => {
                status.textContent = "";
                try {
                    const next: Role = user.role === "admin" ? "annotator" : "admin";
                    await client.updateUserRole(user.id, next);
                    await renderUsers(client, box);
                } catch (err) {
                    status.textContent = errText(err);
                }
            },
        }),
        el("button", {
            class: "drop-user",
            text: "delete",
            onclick: async () => {
                status.textContent = "";
                try {
                    await client.deleteUser(user.id);
                    await renderUsers(client, box);
                } catch (err) {
                    status.textContent = errText(err);
                }
            },
        }),
    );
}

async function renderProjects(client: ApiClient, box: HTMLElement): Promise<void> {
    clear(box);
    const projects = await client.listProjects();
    const status = el("p", { class: "form-error", role: "alert" });

    const cards = el("div", { class: "project-cards" });
    for (const project of projects) {
        cards.append(await projectCard(client, box, project, status));
    }

    const name = el("input", { name: "new-project", placeholder: "project name" });
    const form = el(
        "form",
        {
            class: "create-project",
            onsubmit: async (event) => {
                event.preventDefault();
                status.textContent = "";
                try {
                    await client.createProject(name.value);
                    await renderProjects(client, box);
                } catch (err) {
                    status.textContent = errText(err);
                }
            },
        },
        name,
        el("button", { type: "submit", text: "Create project" }),
    );

    box.append(el("h2", { text: "Projects" }), cards, form, status);
}

async function projectCard(
    client: ApiClient,
    box: HTMLElement,
    project: ProjectSummary,
    status: HTMLElement,
): Promise<HTMLElement> {
    const refresh = () => renderProjects(client, box);
    const keyView = el("code", { class: "api-key", text: project.api_key ?? "" });

    const memberId = el("input", { name: "member-id", placeholder: "user id", size: "6" });
    const memberForm = el(
        "form",
        {
            class: "add-member",
            onsubmit: async (event) => {
                event.preventDefault();
                status.textContent = "";
                try {
                    await client.addMember(project.id, Number(memberId.value));
                    memberId.value = "";
                } catch (err) {
                    status.textContent = errText(err);
                }
            },
        },
        memberId,
        el("button", { type: "submit", text: "Add member" }),
    );

    const labelName = el("input", { name: "label-name", placeholder: "label name" });
    const labelKind = el("select", { name: "label-kind" },
        el("option", { value: "single", text: "single" }),
        el("option", { value: "multi", text: "multi" }),
    );
    const labelForm = el(
        "form",
        {
            class: "add-label",
            onsubmit: async (event) => {
                event.preventDefault();
                status.textContent = "";
                try {
                    await client.createLabel(
                        project.id, labelName.value, labelKind.value as "single" | "multi",
                    );
                    await refresh();
                } catch (err) {
                    status.textContent = errText(err);
                }
            },
        },
        labelName, labelKind,
        el("button", { type: "submit", text: "Add label" }),
    );

    const valueLabelId = el("input", { name: "value-label-id", placeholder: "label id", size: "6" });
    const valueText = el("input", { name: "value-text", placeholder: "new value" });
    const valueForm = el(
        "form",
        {
            class: "add-value",
            onsubmit: async (event) => {
                event.preventDefault();
                status.textContent = "";
                try {
                    await client.createLabelValue(Number(valueLabelId.value), valueText.value);
                    valueText.value = "";
                } catch (err) {
                    status.textContent = errText(err);
                }
            },
        },
        valueLabelId, valueText,
        el("button", { type: "submit", text: "Add value" }),
    );

    const werA = el("input", { name: "wer-a", placeholder: "annotator a" });
    const werB = el("input", { name: "wer-b", placeholder: "annotator b" });
    const werOut = el("pre", { class: "wer-report" });
    const werForm = el(
        "form",
        {
            class: "wer-form",
            onsubmit: async (event) => {
                event.preventDefault();
                status.textContent = "";
                werOut.textContent = "";
                try {
                    const report = await client.werReport(project.id, werA.value, werB.value);
                    werOut.textContent = report.rows
                        .map((row) => {
                            const value = row.wer === null ? "n/a" : row.wer.toFixed(3);
                            const flag = row.flagged ? "  ← disagreement" : "";
                            return `${row.original_filename}: ${value}${flag}`;
                        })
                        .join("\n") || "(no datapoints annotated by both)";
                } catch (err) {
                    status.textContent = errText(err);
                }
            },
        },
        werA, werB,
        el("button", { type: "submit", text: "Agreement report" }),
    );

    return el(
        "article",
        { class: "project-card", "data-project-id": String(project.id) },
        el("h3", { text: `${project.name} (#${project.id})` }),
        el("p", { class: "key-line" }, "API key: ", keyView, " ",
            el("button", {
                class: "rotate-key", text: "rotate",
                onclick: async () => {
                    status.textContent = "";
                    try {
                        const updated = await client.rotateApiKey(project.id);
                        keyView.textContent = updated.api_key ?? "";
                    } catch (err) {
                        status.textContent = errText(err);
                    }
                },
            }),
        ),
        el("p", {}, el("a", {
            class: "export-link",
            href: client.exportUrl(project.id),
            text: "Download export",
        })),
        memberForm, labelForm, valueForm, werForm,
        el("button", {
            class: "rename-project", text: "rename",
            onclick: async () => {
                const next = window.prompt("New name", project.name);
                if (!next) return;
                try {
                    await client.renameProject(project.id, next);
                    await refresh();
                } catch (err) {
                    status.textContent = errText(err);
                }
            },
        }),
        el("button", {
            class: "drop-project", text: "delete project",
            onclick: async () => {
                if (!window.confirm(`Delete project "${project.name}"?`)) return;
                try {
                    await client.deleteProject(project.id);
                    await refresh();
                } catch (err) {
                    status.textContent = errText(err);
                }
            },
        }),
    );
}
