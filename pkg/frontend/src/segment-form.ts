/**
 * The segment editing form: local draft state that only reaches the
 * server on an explicit save, label selection rules, and the mapping of
 * server error codes onto form fields.
 */

import { LabelSchema, SegmentView } from "./types.js";

/** Every piece of text leaves the client canonically composed. */
export function nfc(text: string): string {
    return text.normalize("NFC");
}

export interface SegmentDraft {
    /** null until the first successful save */
    id: number | null;
    startMs: number;
    endMs: number;
    transcription: string;
    /** label id -> chosen value ids */
    selections: Map<number, Set<number>>;
    dirty: boolean;
}

export function newDraft(startMs: number, endMs: number): SegmentDraft {
    return {
        id: null,
        startMs,
        endMs,
        transcription: "",
        selections: new Map(),
        dirty: true,
    };
}

export function draftFromSegment(segment: SegmentView): SegmentDraft {
    const selections = new Map<number, Set<number>>();
    for (const [labelId, valueIds] of Object.entries(segment.labels)) {
        selections.set(Number(labelId), new Set(valueIds));
    }
    return {
        id: segment.id,
        startMs: segment.start_ms,
        endMs: segment.end_ms,
        transcription: segment.transcription,
        selections,
        dirty: false,
    };
}

/**
 * Toggle one label value on the draft. Single-choice labels behave like
 * radio buttons (clicking the chosen value clears it); multi-choice
 * like checkboxes.
 */
export function toggleValue(
    draft: SegmentDraft,
    label: LabelSchema,
    valueId: number,
): void {
    const current = draft.selections.get(label.id) ?? new Set<number>();
    if (label.selection_type === "single") {
        if (current.has(valueId)) {
            draft.selections.delete(label.id);
        } else {
            draft.selections.set(label.id, new Set([valueId]));
        }
    } else {
        if (current.has(valueId)) {
            current.delete(valueId);
            if (current.size === 0) draft.selections.delete(label.id);
            else draft.selections.set(label.id, current);
        } else {
            current.add(valueId);
            draft.selections.set(label.id, current);
        }
    }
    draft.dirty = true;
}

export function setTranscription(draft: SegmentDraft, text: string): void {
    draft.transcription = text;
    draft.dirty = true;
}

export interface SegmentPayload {
    start_ms: number;
    end_ms: number;
    transcription: string;
    labels: Record<string, number[]>;
}

export function buildPayload(draft: SegmentDraft): SegmentPayload {
    const labels: Record<string, number[]> = {};
    for (const [labelId, valueIds] of draft.selections) {
        if (valueIds.size > 0) {
            labels[String(labelId)] = [...valueIds].sort((a, b) => a - b);
        }
    }
    return {
        start_ms: draft.startMs,
        end_ms: draft.endMs,
        transcription: nfc(draft.transcription),
        labels,
    };
}

export type FormField = "times" | "labels" | "transcription" | "form";

/** Which part of the form a server rejection points at. */
export function fieldForError(code: string): FormField {
    switch (code) {
        case "ERR_BOUNDS":
        case "ERR_EMPTY_INTERVAL":
            return "times";
        case "ERR_CARDINALITY":
        case "ERR_LABEL_SCOPE":
            return "labels";
        case "ERR_INVALID_ENCODING":
            return "transcription";
        default:
            return "form";
    }
}
