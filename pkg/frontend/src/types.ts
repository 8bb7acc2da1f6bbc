/** Wire shapes of the REST API this client consumes. */

export type Role = "admin" | "annotator";

export interface ProjectSummary {
    id: number;
    name: string;
    created_at: string;
    /** present only in admin responses */
    api_key?: string;
}

export interface LabelValue {
    id: number;
    value: string;
}

export interface LabelSchema {
    id: number;
    name: string;
    selection_type: "single" | "multi";
    values: LabelValue[];
}

export interface SegmentView {
    id: number;
    start_ms: number;
    end_ms: number;
    transcription: string;
    /** label id (as a string key) -> chosen value ids */
    labels: Record<string, number[]>;
}

export interface AssignmentView {
    id: number;
    status: "pending" | "completed";
    marked_for_review: boolean;
}

export interface DatapointListItem {
    datapoint_id: number;
    assignment_id: number;
    original_filename: string;
    stored_name: string;
    format: "wav" | "mp3" | "ogg";
    duration_ms: number;
    status: "pending" | "completed";
    marked_for_review: boolean;
}

export interface DatapointPage {
    items: DatapointListItem[];
    total: number;
    page: number;
    page_size: number;
}

export interface DatapointDetail {
    id: number;
    project_id: number;
    original_filename: string;
    stored_name: string;
    audio_url: string;
    format: "wav" | "mp3" | "ogg";
    duration_ms: number;
    reference_transcription: string | null;
    labels: LabelSchema[];
    assignment: AssignmentView | null;
    segments: SegmentView[];
}

export interface UserView {
    id: number;
    username: string;
    role: Role;
    created_at: string;
}

export interface WerRow {
    datapoint_id: number;
    original_filename: string;
    wer: number | null;
    flagged: boolean;
}

export interface WerReport {
    project_id: number;
    pair: [string, string];
    rows: WerRow[];
    threshold: number;
    generated_at: string;
}

export type Category = "all" | "pending" | "completed" | "marked_review";
