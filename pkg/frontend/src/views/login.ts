import { ApiClient, ApiError } from "../api.js";
import { clear, el } from "../dom.js";

export function renderLogin(
    client: ApiClient,
    root: HTMLElement,
    onLoggedIn: () => void,
): void {
    clear(root);
    const status = el("p", { class: "form-error", role: "alert" });
    const username = el("input", { name: "username", autocomplete: "username" });
    const password = el("input", { name: "password", type: "password" });

    const form = el(
        "form",
        {
            class: "login-form",
            onsubmit: async (event) => {
                event.preventDefault();
                status.textContent = "";
                try {
                    await client.login(username.value, password.value);
                    onLoggedIn();
                } catch (err) {
                    if (err instanceof ApiError && err.code === "ERR_BAD_CREDENTIALS") {
                        status.textContent = "Wrong username or password.";
                    } else {
                        status.textContent = "Login failed. Try again.";
                    }
                }
            },
        },
        el("h1", { text: "Sign in" }),
        el("label", { text: "Username" }, username),
        el("label", { text: "Password" }, password),
        el("button", { type: "submit", text: "Log in" }),
        status,
    );
    root.append(form);
}
