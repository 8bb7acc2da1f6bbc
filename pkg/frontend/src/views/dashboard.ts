import { ApiClient } from "../api.js";
import { clear, el, fmtMs } from "../dom.js";
import { Category } from "../types.js";

export async function renderProjectList(
    client: ApiClient,
    root: HTMLElement,
    navigate: (hash: string) => void,
): Promise<void> {
    clear(root);
    const projects = await client.listProjects();
    const list = el("ul", { class: "project-list" });
    for (const project of projects) {
        list.append(
            el(
                "li",
                {},
                el("a", {
                    href: `#/projects/${project.id}`,
                    text: project.name,
                    onclick: (event) => {
                        event.preventDefault();
                        navigate(`#/projects/${project.id}`);
                    },
                }),
            ),
        );
    }
    root.append(el("h1", { text: "Projects" }), list);
    if (projects.length === 0) {
        root.append(el("p", { text: "No projects assigned to you yet." }));
    }
}

const CATEGORIES: Category[] = ["all", "pending", "completed", "marked_review"];

export async function renderDatapointList(
    client: ApiClient,
    root: HTMLElement,
    projectId: number,
    navigate: (hash: string) => void,
    category: Category = "all",
    page = 1,
): Promise<void> {
    clear(root);
    const pageData = await client.listDatapoints(projectId, category, page);
    const lastPage = Math.max(1, Math.ceil(pageData.total / pageData.page_size));

    const tabs = el("nav", { class: "category-tabs" });
    for (const tab of CATEGORIES) {
        tabs.append(
            el("button", {
                text: tab.replace("_", " "),
                class: tab === category ? "tab active" : "tab",
                onclick: () =>
                    renderDatapointList(client, root, projectId, navigate, tab, 1),
            }),
        );
    }

    const rows = el("ul", { class: "datapoint-list" });
    for (const item of pageData.items) {
        const flags = [
            item.status,
            item.marked_for_review ? "review" : null,
        ].filter(Boolean).join(", ");
        rows.append(
            el(
                "li",
                {},
                el("a", {
                    href: `#/data/${item.datapoint_id}`,
                    text: `${item.original_filename} (${fmtMs(item.duration_ms)}) — ${flags}`,
                    onclick: (event) => {
                        event.preventDefault();
                        navigate(`#/data/${item.datapoint_id}`);
                    },
                }),
            ),
        );
    }

    const pager = el(
        "div",
        { class: "pager" },
        el("button", {
            text: "Prev",
            onclick: () => {
                if (page > 1) {
                    renderDatapointList(client, root, projectId, navigate, category, page - 1);
                }
            },
        }),
        el("span", { text: ` page ${page} of ${lastPage} (${pageData.total} files) ` }),
        el("button", {
            text: "Next",
            onclick: () => {
                if (page < lastPage) {
                    renderDatapointList(client, root, projectId, navigate, category, page + 1);
                }
            },
        }),
    );

    root.append(el("h1", { text: "Audio files" }), tabs, rows, pager);
}
