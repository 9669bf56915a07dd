/**
 * Thin fetch wrapper over the operator service. Works in the browser and in
 * Node 20+ (global fetch with readable body streams), which is what the
 * integration tests use.
 */
import { decodeNdjson } from "./protocol.js";
export class ServiceError extends Error {
    status;
    constructor(message, status) {
        super(message);
        this.status = status;
    }
}
async function expectJson(response) {
    const body = (await response.json());
    if (!response.ok) {
        throw new ServiceError(body.error ?? response.statusText, response.status);
    }
    return body;
}
export class ServiceClient {
    base;
    constructor(base) {
        this.base = base;
    }
    health() {
        return fetch(`${this.base}/health`).then((r) => expectJson(r));
    }
    state() {
        return fetch(`${this.base}/state`).then((r) => expectJson(r));
    }
    plotdata() {
        return fetch(`${this.base}/plotdata`).then((r) => expectJson(r));
    }
    postJob(document) {
        return fetch(`${this.base}/jobs`, { method: "POST", body: document }).then((r) => expectJson(r));
    }
    control(command) {
        return fetch(`${this.base}/control`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ command }),
        }).then((r) => expectJson(r));
    }
    setSpeed(speed) {
        return fetch(`${this.base}/speed`, {
            method: "PUT",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ speed }),
        }).then((r) => expectJson(r));
    }
    screenDocument() {
        return fetch(`${this.base}/screen`).then((r) => r.text());
    }
    async putScreen(document) {
        const response = await fetch(`${this.base}/screen`, { method: "PUT", body: document });
        const body = (await response.json());
        return {
            ok: response.ok,
            diagnostics: body.diagnostics ?? [],
            error: body.error,
        };
    }
    reportSummary() {
        return fetch(`${this.base}/report/summary`).then((r) => (r.ok ? r.text() : null));
    }
    /**
     * Consume the NDJSON telemetry stream, invoking `onEvent` per event in
     * stream order. Resolves when the stream ends or the signal aborts.
     */
    async streamTelemetry(onEvent, signal) {
        const response = await fetch(`${this.base}/telemetry`, { signal });
        if (!response.ok || response.body === null) {
            throw new ServiceError(`telemetry unavailable (${response.status})`, response.status);
        }
        const reader = response.body.getReader();
        const decoder = new TextDecoder();
        let carry = "";
        try {
            for (;;) {
                const { done, value } = await reader.read();
                if (done)
                    break;
                const decoded = decodeNdjson(carry, decoder.decode(value, { stream: true }));
                carry = decoded.carry;
                for (const event of decoded.events) {
                    onEvent(event);
                }
            }
        }
        finally {
            reader.releaseLock();
        }
    }
}
