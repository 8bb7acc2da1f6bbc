/**
 * The annotation workspace: waveform canvas with drag selection, audio
 * transport, and the segment form. Segment edits live in a local draft
 * and reach the server only on an explicit save or delete.
 */

import { ApiClient, ApiError } from "../api.js";
import { clear, el, fmtMs } from "../dom.js";
import {
    applyTransport,
    createViewport,
    maxZoom,
    pixelToTime,
    scrollTo,
    setZoom,
    timeToPixel,
    Viewport,
    visibleSpanMs,
} from "../viewport.js";
import {
    computePeaks,
    DragGesture,
    parseWavSamples,
    Peak,
    PixelSpan,
    spanToInterval,
} from "../waveform.js";
import {
    buildPayload,
    draftFromSegment,
    fieldForError,
    newDraft,
    SegmentDraft,
    setTranscription,
    toggleValue,
} from "../segment-form.js";
import { DatapointDetail, SegmentView } from "../types.js";

const CANVAS_W = 800;
const CANVAS_H = 120;

const ERROR_TEXT: Record<string, string> = {
    ERR_BOUNDS: "Times fall outside the audio.",
    ERR_EMPTY_INTERVAL: "End must be after start.",
    ERR_CARDINALITY: "Pick exactly one value for single-choice labels.",
    ERR_LABEL_SCOPE: "That label value does not belong to this project.",
    ERR_INVALID_ENCODING: "Transcription contains invalid characters.",
};

export async function renderWorkspace(
    client: ApiClient,
    root: HTMLElement,
    datapointId: number,
    navigate: (hash: string) => void,
): Promise<void> {
    clear(root);
    const detail: DatapointDetail = await client.getDatapoint(datapointId);
    const canEdit = detail.assignment !== null && !client.isAdmin;

    let vp: Viewport = createViewport(detail.duration_ms);
    let segments: SegmentView[] = [...detail.segments];
    let draft: SegmentDraft | null = null;
    let formError = "";
    let peaks: Peak[] = [];
    let previewSpan: PixelSpan | null = null;

    // -- audio -----------------------------------------------------------
    // The audio route needs the bearer token, which an <audio src> cannot
    // send, so bytes are fetched explicitly and served from a blob URL.
    const audio = document.createElement("audio");
    try {
        const buffer = await client.fetchAudio(detail.audio_url);
        if (detail.format === "wav") {
            peaks = computePeaks(parseWavSamples(buffer).samples, CANVAS_W);
        }
        if (typeof URL.createObjectURL === "function") {
            audio.src = URL.createObjectURL(new Blob([buffer]));
        }
    } catch {
        // no waveform; transport still works against a silent element
    }

    function syncAudio(): void {
        try {
            audio.currentTime = vp.playheadMs / 1000;
        } catch {
            // media stack unavailable (tests); playhead state is enough
        }
    }
    audio.addEventListener("timeupdate", () => {
        vp = applyTransport(vp, {
            kind: "seek",
            timeMs: Math.round(audio.currentTime * 1000),
        });
        updateReadout();
        paint();
    });

    // -- waveform canvas -------------------------------------------------

    const canvas = el("canvas", { class: "waveform", width: String(CANVAS_W), height: String(CANVAS_H) });
    const overlay = el("div", { class: "wave-overlay", tabindex: "0" });
    const stage = el("div", { class: "wave-stage" }, canvas, overlay);

    let paintCtx: CanvasRenderingContext2D | null = null;
    let ctxProbed = false;

    function paint(): void {
        if (!ctxProbed) {
            ctxProbed = true;
            try {
                paintCtx = canvas.getContext("2d");
            } catch {
                paintCtx = null;
            }
        }
        const g = paintCtx;
        if (!g) return; // headless DOM: state still updates, nothing to draw
        g.clearRect(0, 0, CANVAS_W, CANVAS_H);
        g.fillStyle = "#f4f6f8";
        g.fillRect(0, 0, CANVAS_W, CANVAS_H);
        const mid = CANVAS_H / 2;
        g.fillStyle = "#33658a";
        for (let x = 0; x < CANVAS_W; x++) {
            const t = pixelToTime(x, vp);
            if (t < 0 || t >= vp.durationMs || peaks.length === 0) continue;
            const bucket = Math.min(
                peaks.length - 1,
                Math.floor((t / vp.durationMs) * peaks.length),
            );
            const peak = peaks[bucket] as Peak;
            const top = mid - peak.max * mid;
            const height = Math.max(1, (peak.max - peak.min) * mid);
            g.fillRect(x, top, 1, height);
        }
        for (const seg of segments) {
            const x0 = timeToPixel(seg.start_ms, vp);
            const x1 = timeToPixel(seg.end_ms, vp);
            if (x1 < 0 || x0 > CANVAS_W) continue;
            g.fillStyle = seg.id === vp.selectedSegmentId
                ? "rgba(240, 150, 40, 0.45)"
                : "rgba(120, 180, 90, 0.30)";
            g.fillRect(x0, 0, Math.max(1, x1 - x0), CANVAS_H);
        }
        if (previewSpan) {
            g.fillStyle = "rgba(200, 60, 60, 0.25)";
            g.fillRect(
                previewSpan.startPx, 0,
                Math.max(1, previewSpan.endPx - previewSpan.startPx), CANVAS_H,
            );
        }
        const px = timeToPixel(vp.playheadMs, vp);
        if (px >= 0 && px <= CANVAS_W) {
            g.fillStyle = "#c0392b";
            g.fillRect(px, 0, 2, CANVAS_H);
        }
    }

    const gesture = new DragGesture();
    const eventX = (event: MouseEvent) =>
        event.clientX - overlay.getBoundingClientRect().left;

    overlay.addEventListener("mousedown", (event: MouseEvent) => {
        gesture.begin(eventX(event));
    });
    overlay.addEventListener("mousemove", (event: MouseEvent) => {
        if (!gesture.active) return;
        previewSpan = gesture.preview(eventX(event));
        paint();
    });
    overlay.addEventListener("mouseup", (event: MouseEvent) => {
        const span = gesture.finish(eventX(event));
        previewSpan = null;
        if (span === null) {
            // plain click: move the playhead
            vp = applyTransport(vp, {
                kind: "seek",
                timeMs: pixelToTime(eventX(event), vp),
            });
            syncAudio();
            updateReadout();
            paint();
            return;
        }
        if (!canEdit) return;
        const interval = spanToInterval(span, vp);
        if (interval === null) return;
        draft = newDraft(interval.startMs, interval.endMs);
        vp = { ...vp, selectedSegmentId: null };
        formError = "";
        renderSegmentList();
        renderForm();
        paint();
    });

    // -- transport and zoom ----------------------------------------------

    const readout = el("span", { class: "playhead-readout" });
    function updateReadout(): void {
        readout.textContent = `${fmtMs(vp.playheadMs)} / ${fmtMs(vp.durationMs)}`;
    }

    function playAudio(): void {
        try {
            const maybe = audio.play() as unknown as Promise<void> | undefined;
            if (maybe && typeof maybe.catch === "function") maybe.catch(() => {});
        } catch {
            // headless DOM
        }
    }

    const zoomSlider = el("input", {
        type: "range", class: "zoom",
        min: "1", max: String(maxZoom(vp)), step: "0.25", value: "1",
    });
    zoomSlider.addEventListener("input", () => {
        vp = setZoom(vp, Number(zoomSlider.value), CANVAS_W / 2, CANVAS_W);
        paint();
    });

    const transport = el(
        "div",
        { class: "transport" },
        el("button", {
            class: "t-back", text: "«5s",
            onclick: () => {
                vp = applyTransport(vp, { kind: "backward" });
                syncAudio(); updateReadout(); paint();
            },
        }),
        el("button", { class: "t-play", text: "Play", onclick: () => playAudio() }),
        el("button", {
            class: "t-pause", text: "Pause",
            onclick: () => { try { audio.pause(); } catch { /* headless */ } },
        }),
        el("button", {
            class: "t-fwd", text: "5s»",
            onclick: () => {
                vp = applyTransport(vp, { kind: "forward" });
                syncAudio(); updateReadout(); paint();
            },
        }),
        readout,
        el("label", { class: "zoom-label", text: " zoom " }, zoomSlider),
        el("button", {
            class: "scroll-left", text: "◀",
            onclick: () => {
                vp = scrollTo(vp, vp.scrollOffsetMs - visibleSpanMs(vp, CANVAS_W) / 2, CANVAS_W);
                paint();
            },
        }),
        el("button", {
            class: "scroll-right", text: "▶",
            onclick: () => {
                vp = scrollTo(vp, vp.scrollOffsetMs + visibleSpanMs(vp, CANVAS_W) / 2, CANVAS_W);
                paint();
            },
        }),
    );

    // -- segment list ----------------------------------------------------

    const listBox = el("ul", { class: "segment-list" });
    function renderSegmentList(): void {
        clear(listBox);
        const ordered = [...segments].sort(
            (a, b) => a.start_ms - b.start_ms || a.id - b.id,
        );
        for (const seg of ordered) {
            listBox.append(
                el(
                    "li",
                    {
                        class: seg.id === vp.selectedSegmentId ? "segment selected" : "segment",
                        "data-segment-id": String(seg.id),
                        onclick: () => {
                            draft = draftFromSegment(seg);
                            vp = { ...vp, selectedSegmentId: seg.id };
                            formError = "";
                            renderSegmentList();
                            renderForm();
                            paint();
                        },
                    },
                    `${fmtMs(seg.start_ms)}–${fmtMs(seg.end_ms)}  ${seg.transcription || "(no transcript)"}`,
                ),
            );
        }
    }

    // -- segment form ----------------------------------------------------

    const formBox = el("div", { class: "segment-form" });

    async function saveDraft(): Promise<void> {
        if (!draft) return;
        const payload = buildPayload(draft);
        try {
            const saved = draft.id === null
                ? await client.createSegment(detail.id, payload)
                : await client.updateSegment(draft.id, payload);
            const idx = segments.findIndex((s) => s.id === saved.id);
            if (idx >= 0) segments[idx] = saved;
            else segments.push(saved);
            draft = draftFromSegment(saved);
            vp = { ...vp, selectedSegmentId: saved.id };
            formError = "";
        } catch (err) {
            if (!(err instanceof ApiError)) throw err;
            const field = fieldForError(err.code);
            formError = `${field}: ${ERROR_TEXT[err.code] ?? err.code}`;
        }
        renderSegmentList();
        renderForm();
        paint();
    }

    async function deleteDraft(): Promise<void> {
        if (!draft || draft.id === null) return;
        await client.deleteSegment(draft.id);
        const gone = draft.id;
        segments = segments.filter((s) => s.id !== gone);
        draft = null;
        vp = { ...vp, selectedSegmentId: null };
        formError = "";
        renderSegmentList();
        renderForm();
        paint();
    }

    function renderForm(): void {
        clear(formBox);
        if (!canEdit) {
            formBox.append(el("p", {
                class: "readonly-note",
                text: "Read-only view — you are not assigned to this file.",
            }));
            return;
        }
        if (draft === null) {
            formBox.append(el("p", {
                class: "form-hint",
                text: "Drag on the waveform to create a segment, or click one in the list to edit it.",
            }));
            return;
        }
        const d = draft;

        const transcript = el("textarea", { name: "transcription", rows: "3" });
        transcript.value = d.transcription;
        transcript.addEventListener("input", () => setTranscription(d, transcript.value));

        const groups = el("div", { class: "label-groups" });
        for (const label of detail.labels) {
            const group = el(
                "fieldset",
                { class: "label-group", "data-label-id": String(label.id) },
                el("legend", { text: `${label.name} (${label.selection_type})` }),
            );
            for (const value of label.values) {
                const input = el("input", {
                    type: label.selection_type === "single" ? "radio" : "checkbox",
                    name: `label-${label.id}`,
                    "data-value-id": String(value.id),
                });
                input.checked = d.selections.get(label.id)?.has(value.id) ?? false;
                input.addEventListener("click", () => {
                    toggleValue(d, label, value.id);
                    renderForm(); // re-sync checks (single-choice can clear)
                });
                group.append(el("label", { class: "value-option" }, input, value.value));
            }
            groups.append(group);
        }

        formBox.append(el(
            "div",
            { class: "form-body" },
            el("p", {
                class: "field-times",
                text: `${fmtMs(d.startMs)} – ${fmtMs(d.endMs)}`,
            }),
            el("label", { text: "Transcription" }, transcript),
            groups,
            el("button", {
                class: "save-segment",
                text: d.id === null ? "Save segment" : "Update segment",
                onclick: () => { void saveDraft(); },
            }),
            d.id === null
                ? null
                : el("button", {
                    class: "delete-segment", text: "Delete",
                    onclick: () => { void deleteDraft(); },
                }),
            el("button", {
                class: "discard-draft", text: "Discard",
                onclick: () => {
                    draft = null;
                    vp = { ...vp, selectedSegmentId: null };
                    formError = "";
                    renderSegmentList();
                    renderForm();
                    paint();
                },
            }),
            el("p", { class: "form-error", role: "alert", text: formError }),
        ));
    }

    // -- assignment controls ---------------------------------------------

    const workStatus = el("div", { class: "work-status" });
    function renderWorkStatus(): void {
        clear(workStatus);
        const assignment = detail.assignment;
        if (!canEdit || assignment === null) return;
        const review = el("input", { type: "checkbox", class: "review-flag" });
        review.checked = assignment.marked_for_review;
        review.addEventListener("change", () => {
            void client
                .setReviewFlag(detail.id, review.checked)
                .then(() => { assignment.marked_for_review = review.checked; })
                .catch(() => { review.checked = assignment.marked_for_review; });
        });
        workStatus.append(
            el("button", {
                class: "toggle-status",
                text: assignment.status === "completed" ? "Reopen" : "Mark completed",
                onclick: () => {
                    const next = assignment.status === "completed" ? "pending" : "completed";
                    void client.setStatus(detail.id, next).then(() => {
                        assignment.status = next;
                        renderWorkStatus();
                    });
                },
            }),
            el("label", { class: "review-label", text: " needs review " }, review),
        );
    }

    // -- assemble --------------------------------------------------------

    root.append(el(
        "section",
        { class: "workspace" },
        el(
            "header",
            { class: "workspace-header" },
            el("a", {
                href: `#/projects/${detail.project_id}`,
                text: "← back to files",
                onclick: (event) => {
                    event.preventDefault();
                    navigate(`#/projects/${detail.project_id}`);
                },
            }),
            el("h1", { text: detail.original_filename }),
        ),
        stage,
        transport,
        detail.reference_transcription
            ? el("p", {
                class: "reference-transcription",
                text: `Reference: ${detail.reference_transcription}`,
            })
            : null,
        workStatus,
        el("h2", { text: "Segments" }),
        listBox,
        formBox,
    ));
    updateReadout();
    renderWorkStatus();
    renderSegmentList();
    renderForm();
    paint();
}
