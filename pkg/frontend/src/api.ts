/**
 * Thin typed client over the annotation service's REST API. Holds the
 * bearer token, normalizes outgoing text to NFC, and turns the uniform
 * `{"error": "ERR_..."}` envelope into ApiError instances.
 */

import { nfc } from "./segment-form.js";
import {
    Category,
    DatapointDetail,
    DatapointPage,
    LabelSchema,
    ProjectSummary,
    Role,
    SegmentView,
    UserView,
    WerReport,
} from "./types.js";

export class ApiError extends Error {
    constructor(
        public readonly code: string,
        public readonly status: number,
        public readonly detail?: string,
    ) {
        super(detail ? `${code}: ${detail}` : code);
        this.name = "ApiError";
    }
}

export interface SessionInfo {
    token: string;
    username: string;
    role: Role;
    userId: number;
}

/** The signed token carries its claims in the clear; read them rather
 * than asking the server who we are. */
export function readClaims(token: string): { user_id: number; role: Role } {
    const middle = token.split(".")[1] ?? "";
    const b64 = middle.replace(/-/g, "+").replace(/_/g, "/");
    // atob yields one char per byte; decode those bytes as UTF-8
    const bytes = Uint8Array.from(atob(b64), (c) => c.charCodeAt(0));
    return JSON.parse(new TextDecoder().decode(bytes));
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
    session: SessionInfo | null = null;

    constructor(
        private readonly baseUrl: string = "",
        private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
    ) {}

    private async request<T>(
        method: string,
        path: string,
        body?: unknown,
    ): Promise<T> {
        const headers: Record<string, string> = {};
        if (this.session) headers["Authorization"] = `Bearer ${this.session.token}`;
        if (body !== undefined) headers["Content-Type"] = "application/json";
        const response = await this.fetchImpl(this.baseUrl + path, {
            method,
            headers,
            body: body === undefined ? undefined : JSON.stringify(body),
        });
        if (response.status === 204) return undefined as T;
        if (!response.ok) {
            let code = `HTTP_${response.status}`;
            let detail: string | undefined;
            try {
                const envelope = await response.json();
                if (envelope.error) code = envelope.error;
                detail = envelope.detail;
            } catch {
                // non-JSON error body: keep the status-based code
            }
            throw new ApiError(code, response.status, detail);
        }
        return (await response.json()) as T;
    }

    // ---- session -------------------------------------------------------

    async login(username: string, password: string): Promise<SessionInfo> {
        const reply = await this.request<{ token: string }>("POST", "/auth/login", {
            username: nfc(username),
            password,
        });
        const claims = readClaims(reply.token);
        this.session = {
            token: reply.token,
            username: nfc(username),
            role: claims.role,
            userId: claims.user_id,
        };
        return this.session;
    }

    async logout(): Promise<void> {
        if (!this.session) return;
        try {
            await this.request<void>("DELETE", "/auth/logout");
        } catch {
            // the local credentials are dropped regardless
        } finally {
            this.session = null;
        }
    }

    get isAdmin(): boolean {
        return this.session?.role === "admin";
    }

    // ---- annotator workflow -------------------------------------------

    listProjects(): Promise<ProjectSummary[]> {
        return this.request("GET", "/projects");
    }

    listDatapoints(
        projectId: number,
        category: Category = "all",
        page = 1,
        pageSize = 10,
    ): Promise<DatapointPage> {
        const query = new URLSearchParams({
            category,
            page: String(page),
            page_size: String(pageSize),
        });
        return this.request("GET", `/projects/${projectId}/data?${query}`);
    }

    getDatapoint(datapointId: number): Promise<DatapointDetail> {
        return this.request("GET", `/data/${datapointId}`);
    }

    createSegment(
        datapointId: number,
        payload: {
            start_ms: number;
            end_ms: number;
            transcription: string;
            labels: Record<string, number[]>;
        },
    ): Promise<SegmentView> {
        return this.request("POST", `/data/${datapointId}/segments`, payload);
    }

    updateSegment(
        segmentId: number,
        patch: Partial<{
            start_ms: number;
            end_ms: number;
            transcription: string;
            labels: Record<string, number[]>;
        }>,
    ): Promise<SegmentView> {
        return this.request("PATCH", `/segments/${segmentId}`, patch);
    }

    deleteSegment(segmentId: number): Promise<void> {
        return this.request("DELETE", `/segments/${segmentId}`);
    }

    setStatus(datapointId: number, status: "pending" | "completed") {
        return this.request<unknown>("PATCH", `/data/${datapointId}`, { status });
    }

    setReviewFlag(datapointId: number, marked: boolean) {
        return this.request<unknown>("PATCH", `/data/${datapointId}`, {
            marked_for_review: marked,
        });
    }

    audioUrl(detailAudioUrl: string): string {
        return this.baseUrl + detailAudioUrl;
    }

    /** Ranged fetch of audio bytes (the server supports seeking). */
    async fetchAudio(detailAudioUrl: string, range?: [number, number]): Promise<ArrayBuffer> {
        const headers: Record<string, string> = {};
        if (this.session) headers["Authorization"] = `Bearer ${this.session.token}`;
        if (range) headers["Range"] = `bytes=${range[0]}-${range[1]}`;
        const response = await this.fetchImpl(this.baseUrl + detailAudioUrl, { headers });
        if (!response.ok && response.status !== 206) {
            throw new ApiError(`HTTP_${response.status}`, response.status);
        }
        return response.arrayBuffer();
    }

    // ---- admin panel ---------------------------------------------------

    listUsers(): Promise<UserView[]> {
        return this.request("GET", "/users");
    }

    createUser(username: string, password: string, role: Role): Promise<UserView> {
        return this.request("POST", "/users", {
            username: nfc(username),
            password,
            role,
        });
    }

    updateUserRole(userId: number, role: Role): Promise<UserView> {
        return this.request("PATCH", `/users/${userId}`, { role });
    }

    deleteUser(userId: number): Promise<void> {
        return this.request("DELETE", `/users/${userId}`);
    }

    createProject(name: string): Promise<ProjectSummary> {
        return this.request("POST", "/projects", { name: nfc(name) });
    }

    renameProject(projectId: number, name: string): Promise<ProjectSummary> {
        return this.request("PATCH", `/projects/${projectId}`, { name: nfc(name) });
    }

    deleteProject(projectId: number): Promise<void> {
        return this.request("DELETE", `/projects/${projectId}`);
    }

    addMember(projectId: number, userId: number): Promise<unknown> {
        return this.request("POST", `/projects/${projectId}/users`, {
            user_id: userId,
        });
    }

    createLabel(
        projectId: number,
        name: string,
        selectionType: "single" | "multi",
    ): Promise<LabelSchema> {
        return this.request("POST", `/projects/${projectId}/labels`, {
            name: nfc(name),
            selection_type: selectionType,
        });
    }

    createLabelValue(labelId: number, value: string): Promise<unknown> {
        return this.request("POST", `/labels/${labelId}/values`, {
            value: nfc(value),
        });
    }

    deleteLabel(labelId: number): Promise<void> {
        return this.request("DELETE", `/labels/${labelId}`);
    }

    rotateApiKey(projectId: number): Promise<ProjectSummary> {
        return this.request("POST", `/projects/${projectId}/api_key`);
    }

    exportUrl(projectId: number): string {
        return `${this.baseUrl}/projects/${projectId}/export`;
    }

    werReport(
        projectId: number,
        userA: string,
        userB: string,
        threshold?: number,
    ): Promise<WerReport> {
        const query = new URLSearchParams({ user_a: userA, user_b: userB });
        if (threshold !== undefined) query.set("threshold", String(threshold));
        return this.request("GET", `/projects/${projectId}/qa/wer?${query}`);
    }
}
