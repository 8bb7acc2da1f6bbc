import { describe, expect, it } from "vitest";
import { ApiClient, ApiError, readClaims } from "../src/api.js";

type Responder = (url: string, init?: RequestInit) => Response | Promise<Response>;

function fakeFetch(responder: Responder) {
    const calls: { url: string; init?: RequestInit }[] = [];
    const fn = async (url: string, init?: RequestInit): Promise<Response> => {
        calls.push({ url, init });
        return responder(url, init);
    };
    return { fn, calls };
}

function json(status: number, body: unknown): Response {
    return new Response(JSON.stringify(body), {
        status,
        headers: { "Content-Type": "application/json" },
    });
}

function b64url(o: unknown): string {
    const bytes = new TextEncoder().encode(JSON.stringify(o));
    const bin = Array.from(bytes, (b) => String.fromCharCode(b)).join("");
    return btoa(bin).replace(/\+/g, "-").replace(/\//g, "_").replace(/=+$/, "");
}

function makeToken(claims: Record<string, unknown>): string {
    return `${b64url({ alg: "HS256", typ: "JWT" })}.${b64url(claims)}.c2ln`;
}

function seededClient(responder: Responder) {
    const { fn, calls } = fakeFetch(responder);
    const client = new ApiClient("http://h", fn);
    client.session = { token: "tok", username: "u", role: "annotator", userId: 3 };
    return { client, calls };
}

describe("readClaims", () => {
    it("decodes the payload segment", () => {
        const token = makeToken({ token_id: "t1", user_id: 7, role: "annotator", exp: 99 });
        expect(readClaims(token)).toEqual({
            token_id: "t1", user_id: 7, role: "annotator", exp: 99,
        });
    });

    it("handles base64url alphabet", () => {
        // three U+07FF chars force a '_' into the encoding
        const claims = { user_id: 1, role: "admin", pad: "߿߿߿" };
        const token = makeToken(claims);
        expect(token.split(".")[1]).toMatch(/_/);
        expect(readClaims(token)).toEqual(claims);
    });
});

describe("login and session", () => {
    it("stores the token and reads role and user id from it", async () => {
        const token = makeToken({ token_id: "a", user_id: 42, role: "admin", exp: 1 });
        const { fn, calls } = fakeFetch(() => json(200, { token, expires_at: "x" }));
        const client = new ApiClient("http://h", fn);
        const session = await client.login("boss", "pw");
        expect(calls[0]?.url).toBe("http://h/auth/login");
        expect(calls[0]?.init?.method).toBe("POST");
        expect(session.role).toBe("admin");
        expect(session.userId).toBe(42);
        expect(client.isAdmin).toBe(true);
    });

    it("sends the username in NFC", async () => {
        const token = makeToken({ user_id: 1, role: "annotator" });
        const { fn, calls } = fakeFetch(() => json(200, { token }));
        const client = new ApiClient("", fn);
        await client.login("rené", "pw");
        const body = JSON.parse(String(calls[0]?.init?.body));
        expect(body.username).toBe("rené");
    });

    it("attaches the bearer token to later requests", async () => {
        const { client, calls } = seededClient(() => json(200, []));
        await client.listProjects();
        const headers = calls[0]?.init?.headers as Record<string, string>;
        expect(headers["Authorization"]).toBe("Bearer tok");
        expect(calls[0]?.url).toBe("http://h/projects");
    });

    it("drops the session on logout even if the server errors", async () => {
        const { client, calls } = seededClient(() => json(500, { error: "ERR_INTERNAL" }));
        await client.logout();
        expect(client.session).toBeNull();
        await client.logout(); // now a no-op
        expect(calls.length).toBe(1);
    });
});

describe("request plumbing", () => {
    it("builds list queries", async () => {
        const { client, calls } = seededClient(() =>
            json(200, { items: [], total: 0, page: 3, page_size: 25 }));
        await client.listDatapoints(9, "completed", 3, 25);
        expect(calls[0]?.url).toBe(
            "http://h/projects/9/data?category=completed&page=3&page_size=25",
        );
    });

    it("turns the error envelope into ApiError", async () => {
        const { client } = seededClient(() =>
            json(403, { error: "ERR_FORBIDDEN", detail: "nope" }));
        const failure = await client.listProjects().catch((e) => e);
        expect(failure).toBeInstanceOf(ApiError);
        expect(failure.code).toBe("ERR_FORBIDDEN");
        expect(failure.status).toBe(403);
        expect(failure.detail).toBe("nope");
        expect(failure.message).toBe("ERR_FORBIDDEN: nope");
    });

    it("falls back to the HTTP status for non-JSON errors", async () => {
        const { client } = seededClient(() => new Response("boom", { status: 502 }));
        const failure = await client.listProjects().catch((e) => e);
        expect(failure.code).toBe("HTTP_502");
        expect(failure.status).toBe(502);
    });

    it("treats 204 as empty success", async () => {
        const { client } = seededClient(() => new Response(null, { status: 204 }));
        await expect(client.deleteSegment(5)).resolves.toBeUndefined();
    });

    it("normalizes outgoing names to NFC", async () => {
        const { client, calls } = seededClient(() => json(201, { id: 1 }));
        await client.createProject("café");
        expect(JSON.parse(String(calls[0]?.init?.body)).name).toBe("café");
        await client.createLabelValue(4, "müsik");
        expect(JSON.parse(String(calls[1]?.init?.body)).value).toBe("müsik");
    });

    it("includes the agreement threshold only when given", async () => {
        const { client, calls } = seededClient(() =>
            json(200, { project_id: 1, pair: ["a", "b"], rows: [], threshold: 0.5 }));
        await client.werReport(1, "a", "b");
        expect(calls[0]?.url).toBe("http://h/projects/1/qa/wer?user_a=a&user_b=b");
        await client.werReport(1, "a", "b", 0.25);
        expect(calls[1]?.url).toBe(
            "http://h/projects/1/qa/wer?user_a=a&user_b=b&threshold=0.25",
        );
    });
});

describe("audio fetching", () => {
    it("sends a Range header and accepts 206", async () => {
        const bytes = new Uint8Array([1, 2, 3, 4]);
        const { client, calls } = seededClient(() =>
            new Response(bytes.slice(0, 2), { status: 206 }));
        const buffer = await client.fetchAudio("/audio/x.wav", [0, 1]);
        const headers = calls[0]?.init?.headers as Record<string, string>;
        expect(headers["Range"]).toBe("bytes=0-1");
        expect(headers["Authorization"]).toBe("Bearer tok");
        expect(new Uint8Array(buffer)).toEqual(new Uint8Array([1, 2]));
    });

    it("rejects unsatisfiable ranges", async () => {
        const { client } = seededClient(() => new Response(null, { status: 416 }));
        const failure = await client.fetchAudio("/audio/x.wav", [999, 1000]).catch((e) => e);
        expect(failure).toBeInstanceOf(ApiError);
        expect(failure.status).toBe(416);
    });

    it("builds absolute urls for the browser widgets", () => {
        const { client } = seededClient(() => json(200, {}));
        expect(client.audioUrl("/audio/x.wav")).toBe("http://h/audio/x.wav");
        expect(client.exportUrl(3)).toBe("http://h/projects/3/export");
    });
});
