/**
 * Hash router and page chrome. Routes:
 *
 *   #/login           sign-in form
 *   #/projects        projects the session can see
 *   #/projects/{id}   datapoint list with category tabs
 *   #/data/{id}       annotation workspace
 *   #/admin           admin panel (admins only)
 *
 * Any 401 from the API drops the session and lands on the login form.
 */

import { ApiClient, ApiError } from "./api.js";
import { clear, el } from "./dom.js";
import { renderAdmin } from "./views/admin.js";
import { renderDatapointList, renderProjectList } from "./views/dashboard.js";
import { renderLogin } from "./views/login.js";
import { renderWorkspace } from "./views/workspace.js";

export class App {
    private readonly nav: HTMLElement;
    private readonly content: HTMLElement;
    private renderedHash = "";
    private readonly onHashChange = (): void => {
        if (this.win.location.hash !== this.renderedHash) void this.route();
    };

    constructor(
        private readonly client: ApiClient,
        mount: HTMLElement,
        private readonly win: Window = window,
    ) {
        this.nav = el("nav", { class: "topbar" });
        this.content = el("main", { class: "content" });
        mount.append(this.nav, this.content);
        this.win.addEventListener("hashchange", this.onHashChange);
    }

    start(): Promise<void> {
        return this.route();
    }

    /** Detach from the window (single-page teardown). */
    destroy(): void {
        this.win.removeEventListener("hashchange", this.onHashChange);
    }

    navigate = (hash: string): Promise<void> => {
        this.win.location.hash = hash;
        return this.route();
    };

    async route(): Promise<void> {
        const hash = this.win.location.hash || "#/projects";
        this.renderedHash = hash;
        this.renderNav();
        if (!this.client.session) {
            this.showLogin();
            return;
        }
        try {
            await this.dispatch(hash);
        } catch (err) {
            if (err instanceof ApiError && err.status === 401) {
                this.client.session = null;
                this.renderNav();
                this.showLogin();
                return;
            }
            clear(this.content);
            this.content.append(el("p", {
                class: "route-error",
                text: err instanceof ApiError ? `Request failed: ${err.code}` : String(err),
            }));
        }
    }

    private async dispatch(hash: string): Promise<void> {
        const parts = hash.replace(/^#\//, "").split("/");
        const head = parts[0] ?? "";
        if (head === "login") {
            this.showLogin();
        } else if (head === "admin") {
            if (!this.client.isAdmin) {
                await this.navigate("#/projects");
                return;
            }
            await renderAdmin(this.client, this.content);
        } else if (head === "projects" && parts.length === 1) {
            await renderProjectList(this.client, this.content, this.navigate);
        } else if (head === "projects" && parts.length === 2) {
            await renderDatapointList(
                this.client, this.content, Number(parts[1]), this.navigate,
            );
        } else if (head === "data" && parts.length === 2) {
            await renderWorkspace(
                this.client, this.content, Number(parts[1]), this.navigate,
            );
        } else {
            await this.navigate("#/projects");
        }
    }

    private showLogin(): void {
        renderLogin(this.client, this.content, () => {
            void this.navigate("#/projects");
        });
    }

    private renderNav(): void {
        clear(this.nav);
        this.nav.append(el("span", { class: "brand", text: "Annotator" }));
        const session = this.client.session;
        if (!session) return;
        this.nav.append(
            el("a", {
                href: "#/projects", text: "Projects", class: "nav-projects",
                onclick: (event) => {
                    event.preventDefault();
                    void this.navigate("#/projects");
                },
            }),
        );
        if (this.client.isAdmin) {
            // never rendered for annotator sessions
            this.nav.append(
                el("a", {
                    href: "#/admin", text: "Admin", class: "nav-admin",
                    onclick: (event) => {
                        event.preventDefault();
                        void this.navigate("#/admin");
                    },
                }),
            );
        }
        this.nav.append(
            el("span", {
                class: "whoami",
                text: ` ${session.username} (${session.role}) `,
            }),
            el("button", {
                class: "logout", text: "Log out",
                onclick: async () => {
                    await this.client.logout();
                    await this.navigate("#/login");
                },
            }),
        );
    }
}
