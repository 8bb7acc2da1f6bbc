// @vitest-environment jsdom
//
// End-to-end UI flows against an in-memory fake of the REST API:
// login, browse, drag out a segment, label it, save, reload, verify.

import { describe, expect, it, vi } from "vitest";
import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";

// ---- fixture: a minimal but honest fake of the service -----------------

function b64url(o: unknown): string {
    const bytes = new TextEncoder().encode(JSON.stringify(o));
    const bin = Array.from(bytes, (b) => String.fromCharCode(b)).join("");
    return btoa(bin).replace(/\+/g, "-").replace(/\//g, "_").replace(/=+$/, "");
}

function makeToken(claims: Record<string, unknown>): string {
    return `${b64url({ alg: "HS256", typ: "JWT" })}.${b64url(claims)}.c2ln`;
}

function json(status: number, body: unknown): Response {
    return new Response(JSON.stringify(body), {
        status,
        headers: { "Content-Type": "application/json" },
    });
}

function err(status: number, code: string): Response {
    return json(status, { error: code });
}

/** 16-bit mono silence, enough of a WAV for the workspace to parse. */
function silenceWav(durationMs: number, sampleRate = 8000): ArrayBuffer {
    const frames = Math.round((sampleRate * durationMs) / 1000);
    const dataBytes = frames * 2;
    const buffer = new ArrayBuffer(44 + dataBytes);
    const view = new DataView(buffer);
    const ascii = (offset: number, text: string) => {
        for (let i = 0; i < text.length; i++) view.setUint8(offset + i, text.charCodeAt(i));
    };
    ascii(0, "RIFF");
    view.setUint32(4, 36 + dataBytes, true);
    ascii(8, "WAVE");
    ascii(12, "fmt ");
    view.setUint32(16, 16, true);
    view.setUint16(20, 1, true);
    view.setUint16(22, 1, true);
    view.setUint32(24, sampleRate, true);
    view.setUint32(28, sampleRate * 2, true);
    view.setUint16(32, 2, true);
    view.setUint16(34, 16, true);
    ascii(36, "data");
    view.setUint32(40, dataBytes, true);
    return buffer;
}

interface FakeSegment {
    id: number;
    start_ms: number;
    end_ms: number;
    transcription: string;
    labels: Record<string, number[]>;
}

const DURATION_MS = 4000;

const LABELS = [
    {
        id: 1, name: "speaker", selection_type: "single",
        values: [{ id: 11, value: "S1" }, { id: 12, value: "S2" }],
    },
    {
        id: 2, name: "noise", selection_type: "multi",
        values: [{ id: 21, value: "hum" }, { id: 22, value: "music" }],
    },
];

class FakeBackend {
    users = [
        { id: 1, username: "boss", password: "pw-b", role: "admin" },
        { id: 2, username: "ann", password: "pw-a", role: "annotator" },
    ];
    tokens = new Map<string, { user_id: number; role: string }>();
    assignment = { id: 1, status: "pending", marked_for_review: false };
    segments: FakeSegment[] = [];
    nextSegmentId = 1;
    wav = silenceWav(DURATION_MS);

    fetch = async (url: string, init?: RequestInit): Promise<Response> => {
        const u = new URL(url, "http://fake");
        const method = init?.method ?? "GET";
        const path = u.pathname;

        if (method === "POST" && path === "/auth/login") {
            const body = JSON.parse(String(init?.body));
            const user = this.users.find(
                (candidate) =>
                    candidate.username === body.username && candidate.password === body.password,
            );
            if (!user) return err(401, "ERR_BAD_CREDENTIALS");
            const token = makeToken({
                token_id: `t${this.tokens.size}`, user_id: user.id, role: user.role, exp: 9e9,
            });
            this.tokens.set(token, { user_id: user.id, role: user.role });
            return json(200, { token, expires_at: "2027-01-01T00:00:00+00:00" });
        }

        const header = (init?.headers as Record<string, string> | undefined)?.["Authorization"] ?? "";
        const who = this.tokens.get(header.replace("Bearer ", ""));
        if (!who) return err(401, "ERR_UNAUTHENTICATED");

        if (method === "DELETE" && path === "/auth/logout") {
            this.tokens.delete(header.replace("Bearer ", ""));
            return new Response(null, { status: 204 });
        }
        if (method === "GET" && path === "/projects") {
            const base = { id: 1, name: "Field Recordings", created_at: "2026-01-01T00:00:00+00:00" };
            return json(200, [who.role === "admin" ? { ...base, api_key: "key-123" } : base]);
        }
        if (method === "GET" && path === "/users") {
            if (who.role !== "admin") return err(403, "ERR_FORBIDDEN");
            return json(200, this.users.map(({ id, username, role }) => ({
                id, username, role, created_at: "2026-01-01T00:00:00+00:00",
            })));
        }
        if (method === "GET" && path === "/projects/1/data") {
            const category = u.searchParams.get("category") ?? "all";
            const visible =
                (category === "all") ||
                (category === this.assignment.status) ||
                (category === "marked_review" && this.assignment.marked_for_review);
            const items = visible
                ? [{
                    datapoint_id: 1, assignment_id: 1, original_filename: "field-a.wav",
                    stored_name: "stored.wav", format: "wav", duration_ms: DURATION_MS,
                    status: this.assignment.status,
                    marked_for_review: this.assignment.marked_for_review,
                }]
                : [];
            return json(200, { items, total: items.length, page: 1, page_size: 10 });
        }
        if (method === "GET" && path === "/data/1") {
            return json(200, {
                id: 1, project_id: 1, original_filename: "field-a.wav",
                stored_name: "stored.wav", audio_url: "/audio/stored.wav",
                format: "wav", duration_ms: DURATION_MS,
                reference_transcription: "reference text",
                labels: LABELS,
                assignment: who.role === "admin" ? null : { ...this.assignment },
                segments: who.role === "admin" ? [] : this.segments.map((s) => ({ ...s })),
            });
        }
        if (method === "GET" && path === "/audio/stored.wav") {
            return new Response(this.wav.slice(0), { status: 200 });
        }
        if (method === "POST" && path === "/data/1/segments") {
            const body = JSON.parse(String(init?.body));
            const bad = this.validate(body);
            if (bad) return bad;
            const segment: FakeSegment = {
                id: this.nextSegmentId++,
                start_ms: body.start_ms,
                end_ms: body.end_ms,
                transcription: String(body.transcription ?? "").normalize("NFC"),
                labels: body.labels ?? {},
            };
            this.segments.push(segment);
            return json(201, { ...segment });
        }
        const segmentMatch = path.match(/^\/segments\/(\d+)$/);
        if (segmentMatch) {
            const segment = this.segments.find((s) => s.id === Number(segmentMatch[1]));
            if (!segment) return err(404, "ERR_NOT_FOUND");
            if (method === "PATCH") {
                const body = JSON.parse(String(init?.body));
                const merged = { ...segment, ...body };
                const bad = this.validate(merged);
                if (bad) return bad;
                Object.assign(segment, merged, {
                    transcription: String(merged.transcription).normalize("NFC"),
                });
                return json(200, { ...segment });
            }
            if (method === "DELETE") {
                this.segments = this.segments.filter((s) => s.id !== segment.id);
                return new Response(null, { status: 204 });
            }
        }
        if (method === "PATCH" && path === "/data/1") {
            const body = JSON.parse(String(init?.body));
            if (body.status) this.assignment.status = body.status;
            if (typeof body.marked_for_review === "boolean") {
                this.assignment.marked_for_review = body.marked_for_review;
            }
            return json(200, { ...this.assignment });
        }
        return err(404, "ERR_NOT_FOUND");
    };

    private validate(body: {
        start_ms: number; end_ms: number; labels?: Record<string, number[]>;
    }): Response | null {
        if (body.start_ms < 0 || body.end_ms > DURATION_MS) return err(400, "ERR_BOUNDS");
        if (body.start_ms >= body.end_ms) return err(400, "ERR_EMPTY_INTERVAL");
        for (const [labelId, valueIds] of Object.entries(body.labels ?? {})) {
            const schema = LABELS.find((l) => String(l.id) === labelId);
            if (!schema) return err(400, "ERR_LABEL_SCOPE");
            if (valueIds.some((v) => !schema.values.some((sv) => sv.id === v))) {
                return err(400, "ERR_LABEL_SCOPE");
            }
            if (schema.selection_type === "single" && valueIds.length !== 1) {
                return err(400, "ERR_CARDINALITY");
            }
        }
        return null;
    }
}

// ---- DOM helpers -------------------------------------------------------

let lastApp: App | null = null;

function freshApp(backend: FakeBackend) {
    lastApp?.destroy(); // stop earlier instances from watching the shared hash
    document.body.innerHTML = "";
    window.location.hash = "";
    const mount = document.createElement("div");
    document.body.append(mount);
    const client = new ApiClient("http://fake", backend.fetch);
    const app = new App(client, mount, window);
    lastApp = app;
    return { mount, client, app };
}

function q<T extends Element>(mount: HTMLElement, selector: string): T {
    const node = mount.querySelector(selector);
    if (!node) throw new Error(`missing ${selector}`);
    return node as T;
}

async function logIn(mount: HTMLElement, username: string, password: string): Promise<void> {
    q<HTMLInputElement>(mount, 'input[name="username"]').value = username;
    q<HTMLInputElement>(mount, 'input[name="password"]').value = password;
    q<HTMLFormElement>(mount, "form.login-form").dispatchEvent(
        new Event("submit", { cancelable: true }),
    );
    await vi.waitFor(() => {
        expect(mount.querySelector("form.login-form")).toBeNull();
    });
}

function mouse(kind: string, clientX: number): MouseEvent {
    return new MouseEvent(kind, { clientX, bubbles: true, cancelable: true });
}

// ---- the flows ---------------------------------------------------------

describe("annotator workflow", () => {
    it("logs in, drags a segment, labels it, saves, and finds it after reload", async () => {
        const backend = new FakeBackend();
        const { mount, client, app } = freshApp(backend);
        await app.start();

        expect(mount.querySelector("form.login-form")).not.toBeNull();
        await logIn(mount, "ann", "pw-a");

        // annotator chrome never shows the admin link
        expect(mount.querySelector(".nav-admin")).toBeNull();
        expect(q(mount, ".whoami").textContent).toContain("ann (annotator)");

        // into the project, then the datapoint
        q<HTMLAnchorElement>(mount, 'a[href="#/projects/1"]').dispatchEvent(mouse("click", 0));
        await vi.waitFor(() => {
            expect(mount.querySelector('a[href="#/data/1"]')).not.toBeNull();
        });
        q<HTMLAnchorElement>(mount, 'a[href="#/data/1"]').dispatchEvent(mouse("click", 0));
        await vi.waitFor(() => {
            expect(mount.querySelector(".wave-overlay")).not.toBeNull();
        });
        expect(q(mount, ".reference-transcription").textContent).toContain("reference text");

        // drag 100px..180px = 1000ms..1800ms at the default 100 px/s
        const overlay = q<HTMLDivElement>(mount, ".wave-overlay");
        overlay.dispatchEvent(mouse("mousedown", 100));
        overlay.dispatchEvent(mouse("mousemove", 140));
        overlay.dispatchEvent(mouse("mouseup", 180));
        const textarea = q<HTMLTextAreaElement>(mount, 'textarea[name="transcription"]');
        expect(q(mount, ".field-times").textContent).toContain("0:01.000 – 0:01.800");

        // type a decomposed transcription, pick a speaker, save
        textarea.value = "नमस्ते café";
        textarea.dispatchEvent(new Event("input"));
        q<HTMLInputElement>(mount, 'input[data-value-id="11"]').click();
        q<HTMLButtonElement>(mount, "button.save-segment").click();
        await vi.waitFor(() => {
            expect(backend.segments.length).toBe(1);
            expect(mount.querySelector('li[data-segment-id="1"]')).not.toBeNull();
        });

        const stored = backend.segments[0] as FakeSegment;
        expect(stored.start_ms).toBe(1000);
        expect(stored.end_ms).toBe(1800);
        expect(stored.transcription).toBe("नमस्ते café"); // NFC on the wire
        expect(stored.labels).toEqual({ "1": [11] });

        // a full reload of the workspace shows the same segment
        await app.navigate("#/data/1");
        q<HTMLLIElement>(mount, 'li[data-segment-id="1"]').click();
        await vi.waitFor(() => {
            expect(
                q<HTMLTextAreaElement>(mount, 'textarea[name="transcription"]').value,
            ).toBe("नमस्ते café");
        });
        expect(q<HTMLInputElement>(mount, 'input[data-value-id="11"]').checked).toBe(true);
        expect(q<HTMLInputElement>(mount, 'input[data-value-id="12"]').checked).toBe(false);
        expect(q(mount, "button.save-segment").textContent).toBe("Update segment");

        // work record controls round-trip
        q<HTMLButtonElement>(mount, "button.toggle-status").click();
        await vi.waitFor(() => {
            expect(backend.assignment.status).toBe("completed");
        });
        q<HTMLInputElement>(mount, "input.review-flag").click();
        await vi.waitFor(() => {
            expect(backend.assignment.marked_for_review).toBe(true);
        });

        // log out lands back on the login form with the session gone
        q<HTMLButtonElement>(mount, "button.logout").click();
        await vi.waitFor(() => {
            expect(mount.querySelector("form.login-form")).not.toBeNull();
        });
        expect(client.session).toBeNull();
    });

    it("treats a zero-width drag as a seek, not a draft", async () => {
        const backend = new FakeBackend();
        const { mount, app } = freshApp(backend);
        await app.start();
        await logIn(mount, "ann", "pw-a");
        await app.navigate("#/data/1");

        const overlay = q<HTMLDivElement>(mount, ".wave-overlay");
        overlay.dispatchEvent(mouse("mousedown", 100));
        overlay.dispatchEvent(mouse("mouseup", 100));
        expect(mount.querySelector('textarea[name="transcription"]')).toBeNull();
        expect(q(mount, ".playhead-readout").textContent).toBe("0:01.000 / 0:04.000");
    });

    it("shows update errors on the form without losing the draft", async () => {
        const backend = new FakeBackend();
        backend.segments.push({
            id: 9, start_ms: 100, end_ms: 600, transcription: "keep me", labels: {},
        });
        backend.nextSegmentId = 10;
        const { mount, app } = freshApp(backend);
        await app.start();
        await logIn(mount, "ann", "pw-a");
        await app.navigate("#/data/1");

        q<HTMLLIElement>(mount, 'li[data-segment-id="9"]').click();
        // sabotage: another session deletes the segment meanwhile
        backend.segments = [];
        q<HTMLButtonElement>(mount, "button.save-segment").click();
        await vi.waitFor(() => {
            expect(q(mount, ".form-error").textContent).toContain("ERR_NOT_FOUND");
        });
        // the draft (and its text) survives the failure
        expect(q<HTMLTextAreaElement>(mount, 'textarea[name="transcription"]').value)
            .toBe("keep me");
    });
});

describe("admin workflow", () => {
    it("reaches the admin panel and sees accounts and the api key", async () => {
        const backend = new FakeBackend();
        const { mount, app } = freshApp(backend);
        await app.start();
        await logIn(mount, "boss", "pw-b");

        q<HTMLAnchorElement>(mount, "a.nav-admin").dispatchEvent(mouse("click", 0));
        await vi.waitFor(() => {
            expect(mount.querySelector(".admin-panel")).not.toBeNull();
            expect(mount.querySelector(".user-list")).not.toBeNull();
            expect(mount.querySelector(".api-key")).not.toBeNull();
        });
        const userText = q(mount, ".user-list").textContent ?? "";
        expect(userText).toContain("ann — annotator");
        expect(userText).toContain("boss — admin");
        expect(q(mount, ".api-key").textContent).toBe("key-123");
        expect(q<HTMLAnchorElement>(mount, "a.export-link").href)
            .toBe("http://fake/projects/1/export");
    });

    it("renders the workspace read-only for an unassigned admin", async () => {
        const backend = new FakeBackend();
        const { mount, app } = freshApp(backend);
        await app.start();
        await logIn(mount, "boss", "pw-b");
        await app.navigate("#/data/1");

        expect(mount.querySelector(".readonly-note")).not.toBeNull();
        const overlay = q<HTMLDivElement>(mount, ".wave-overlay");
        overlay.dispatchEvent(mouse("mousedown", 100));
        overlay.dispatchEvent(mouse("mouseup", 180));
        expect(mount.querySelector('textarea[name="transcription"]')).toBeNull();
    });
});
