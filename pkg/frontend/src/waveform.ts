/**
 * Client-side waveform support: PCM peak extraction (the server never
 * decodes audio) and the drag gesture that turns a mouse selection into
 * a segment interval.
 */

import { pixelToTime, Viewport } from "./viewport.js";

export interface Peak {
    min: number;
    max: number;
}

/**
 * Min/max amplitude per horizontal bucket — one bucket per canvas
 * column is the usual call.
 */
export function computePeaks(samples: Float32Array, buckets: number): Peak[] {
    if (buckets <= 0) return [];
    const out: Peak[] = [];
    const perBucket = samples.length / buckets;
    for (let b = 0; b < buckets; b++) {
        const start = Math.floor(b * perBucket);
        const end = Math.min(samples.length, Math.floor((b + 1) * perBucket));
        if (start >= end) {
            out.push({ min: 0, max: 0 });
            continue;
        }
        let lo = Infinity;
        let hi = -Infinity;
        for (let i = start; i < end; i++) {
            const v = samples[i] as number;
            if (v < lo) lo = v;
            if (v > hi) hi = v;
        }
        out.push({ min: lo, max: hi });
    }
    return out;
}

/**
 * Minimal RIFF/WAVE reader for 16-bit PCM, the format the service's own
 * demo fixtures use. Multi-channel audio is averaged to mono. For mp3
 * and ogg the views fall back to AudioContext.decodeAudioData.
 */
export function parseWavSamples(buffer: ArrayBuffer): {
    sampleRate: number;
    samples: Float32Array;
} {
    const view = new DataView(buffer);
    const tag = (offset: number) =>
        String.fromCharCode(
            view.getUint8(offset), view.getUint8(offset + 1),
            view.getUint8(offset + 2), view.getUint8(offset + 3),
        );
    if (buffer.byteLength < 44 || tag(0) !== "RIFF" || tag(8) !== "WAVE") {
        throw new Error("not a RIFF/WAVE file");
    }
    let channels = 1;
    let sampleRate = 0;
    let bitsPerSample = 16;
    let dataStart = -1;
    let dataLength = 0;
    let offset = 12;
    while (offset + 8 <= buffer.byteLength) {
        const chunkId = tag(offset);
        const chunkSize = view.getUint32(offset + 4, true);
        if (chunkId === "fmt ") {
            channels = view.getUint16(offset + 10, true);
            sampleRate = view.getUint32(offset + 12, true);
            bitsPerSample = view.getUint16(offset + 22, true);
        } else if (chunkId === "data") {
            dataStart = offset + 8;
            dataLength = Math.min(chunkSize, buffer.byteLength - dataStart);
        }
        offset += 8 + chunkSize + (chunkSize % 2);
    }
    if (sampleRate === 0 || dataStart < 0) throw new Error("missing fmt or data chunk");
    if (bitsPerSample !== 16) throw new Error(`unsupported bit depth ${bitsPerSample}`);

    const frameCount = Math.floor(dataLength / (2 * channels));
    const samples = new Float32Array(frameCount);
    for (let frame = 0; frame < frameCount; frame++) {
        let sum = 0;
        for (let ch = 0; ch < channels; ch++) {
            sum += view.getInt16(dataStart + (frame * channels + ch) * 2, true);
        }
        samples[frame] = sum / channels / 32768;
    }
    return { sampleRate, samples };
}

export interface PixelSpan {
    startPx: number;
    endPx: number;
}

/**
 * Mouse-drag tracker. Dragging right-to-left is normalized so the span
 * always runs left to right; a zero-width drag yields null (no call).
 */
export class DragGesture {
    private anchorPx: number | null = null;

    begin(xPx: number): void {
        this.anchorPx = xPx;
    }

    get active(): boolean {
        return this.anchorPx !== null;
    }

    /** Current span for live preview while the button is down. */
    preview(xPx: number): PixelSpan | null {
        if (this.anchorPx === null) return null;
        return {
            startPx: Math.min(this.anchorPx, xPx),
            endPx: Math.max(this.anchorPx, xPx),
        };
    }

    finish(xPx: number): PixelSpan | null {
        const span = this.preview(xPx);
        this.anchorPx = null;
        if (span === null || span.startPx === span.endPx) return null;
        return span;
    }
}

export interface TimeInterval {
    startMs: number;
    endMs: number;
}

/** Map a finished drag into segment times, clamped to the audio. */
export function spanToInterval(span: PixelSpan, vp: Viewport): TimeInterval | null {
    const startMs = Math.max(0, pixelToTime(span.startPx, vp));
    const endMs = Math.min(vp.durationMs, pixelToTime(span.endPx, vp));
    if (startMs >= endMs) return null;
    return { startMs, endMs };
}
