/**
 * Waveform viewport arithmetic: the linear map between canvas pixels and
 * audio time, zooming, scrolling, and transport (playhead) movement.
 *
 * All functions are pure; views hold a Viewport value and replace it.
 */

/**
 * Hard ceiling on effective resolution (basePps * zoom), in pixels per
 * second. Times are integer milliseconds, so past 2000 px/s one
 * millisecond spans more than two pixels and pixel->time->pixel round
 * trips would start drifting beyond +-1 px.
 */
export const MAX_PPS = 2000;

/** Jump size of the forward/backward transport buttons. */
export const STEP_MS = 5000;

export interface Viewport {
    durationMs: number;
    /** pixels per second of audio at zoom 1 */
    basePps: number;
    /** zoom multiplier, >= 1 */
    zoom: number;
    /** audio time at the left canvas edge */
    scrollOffsetMs: number;
    playheadMs: number;
    selectedSegmentId: number | null;
}

export function createViewport(durationMs: number, basePps = 100): Viewport {
    if (durationMs <= 0) throw new Error(`durationMs must be positive, got ${durationMs}`);
    if (basePps <= 0 || basePps > MAX_PPS) {
        throw new Error(`basePps must be in (0, ${MAX_PPS}], got ${basePps}`);
    }
    return {
        durationMs,
        basePps,
        zoom: 1,
        scrollOffsetMs: 0,
        playheadMs: 0,
        selectedSegmentId: null,
    };
}

function clamp(value: number, lo: number, hi: number): number {
    return Math.min(Math.max(value, lo), hi);
}

/** Effective resolution in pixels per second. */
export function pps(vp: Viewport): number {
    return vp.basePps * vp.zoom;
}

export function maxZoom(vp: Viewport): number {
    return MAX_PPS / vp.basePps;
}

/** Canvas x -> audio time. x = 0 maps to the scroll offset. */
export function pixelToTime(xPx: number, vp: Viewport): number {
    return vp.scrollOffsetMs + Math.round((xPx * 1000) / pps(vp));
}

/** Audio time -> canvas x under the current scroll and zoom. */
export function timeToPixel(timeMs: number, vp: Viewport): number {
    return Math.round(((timeMs - vp.scrollOffsetMs) * pps(vp)) / 1000);
}

/** Audio span covered by a canvas of the given width. */
export function visibleSpanMs(vp: Viewport, widthPx: number): number {
    return (widthPx * 1000) / pps(vp);
}

/** Clamp a scroll offset so the visible window stays inside the audio. */
export function scrollTo(vp: Viewport, offsetMs: number, widthPx: number): Viewport {
    const maxOffset = Math.max(0, vp.durationMs - visibleSpanMs(vp, widthPx));
    return { ...vp, scrollOffsetMs: clamp(offsetMs, 0, maxOffset) };
}

/**
 * Change zoom keeping the time under the anchor pixel fixed, so zooming
 * with the mouse wheel magnifies around the cursor instead of the left
 * edge.
 */
export function setZoom(
    vp: Viewport,
    zoom: number,
    anchorPx: number,
    widthPx: number,
): Viewport {
    const bounded = clamp(zoom, 1, maxZoom(vp));
    const anchorTime = pixelToTime(anchorPx, vp);
    const zoomed = { ...vp, zoom: bounded };
    const newOffset = anchorTime - (anchorPx * 1000) / pps(zoomed);
    return scrollTo(zoomed, newOffset, widthPx);
}

export type TransportAction =
    | { kind: "forward" }
    | { kind: "backward" }
    | { kind: "seek"; timeMs: number };

export function applyTransport(vp: Viewport, action: TransportAction): Viewport {
    let target: number;
    switch (action.kind) {
        case "forward":
            target = vp.playheadMs + STEP_MS;
            break;
        case "backward":
            target = vp.playheadMs - STEP_MS;
            break;
        case "seek":
            target = action.timeMs;
            break;
    }
    return { ...vp, playheadMs: clamp(target, 0, vp.durationMs) };
}
