/**
 * Thin fetch wrapper over the operator service. Works in the browser and in
 * Node 20+ (global fetch with readable body streams), which is what the
 * integration tests use.
 */

import { decodeNdjson } from "./protocol.js";
import type { PlotBundle, Snapshot, TelemetryEvent } from "./protocol.js";

export interface ScreenUpdateResult {
  ok: boolean;
  diagnostics: string[];
  error?: string;
}

export class ServiceError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

async function expectJson<T>(response: Response): Promise<T> {
  const body = (await response.json()) as T & { error?: string };
  if (!response.ok) {
    throw new ServiceError(body.error ?? response.statusText, response.status);
  }
  return body;
}

export class ServiceClient {
  constructor(readonly base: string) {}

  health(): Promise<{ status: string }> {
    return fetch(`${this.base}/health`).then((r) => expectJson(r));
  }

  state(): Promise<Snapshot> {
    return fetch(`${this.base}/state`).then((r) => expectJson<Snapshot>(r));
  }

  plotdata(): Promise<PlotBundle> {
    return fetch(`${this.base}/plotdata`).then((r) => expectJson<PlotBundle>(r));
  }

  postJob(document: string): Promise<{ job_id: string }> {
    return fetch(`${this.base}/jobs`, { method: "POST", body: document }).then((r) =>
      expectJson(r),
    );
  }

  control(command: "start" | "pause" | "resume" | "stop"): Promise<Snapshot> {
    return fetch(`${this.base}/control`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ command }),
    }).then((r) => expectJson<Snapshot>(r));
  }

  setSpeed(speed: number): Promise<Snapshot> {
    return fetch(`${this.base}/speed`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ speed }),
    }).then((r) => expectJson<Snapshot>(r));
  }

  screenDocument(): Promise<string> {
    return fetch(`${this.base}/screen`).then((r) => r.text());
  }

  async putScreen(document: string): Promise<ScreenUpdateResult> {
    const response = await fetch(`${this.base}/screen`, { method: "PUT", body: document });
    const body = (await response.json()) as {
      diagnostics?: string[];
      error?: string;
    };
    return {
      ok: response.ok,
      diagnostics: body.diagnostics ?? [],
      error: body.error,
    };
  }

  reportSummary(): Promise<string | null> {
    return fetch(`${this.base}/report/summary`).then((r) => (r.ok ? r.text() : null));
  }

  /**
   * Consume the NDJSON telemetry stream, invoking `onEvent` per event in
   * stream order. Resolves when the stream ends or the signal aborts.
   */
  async streamTelemetry(
    onEvent: (event: TelemetryEvent) => void,
    signal?: AbortSignal,
  ): Promise<void> {
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
        if (done) break;
        const decoded = decodeNdjson(carry, decoder.decode(value, { stream: true }));
        carry = decoded.carry;
        for (const event of decoded.events) {
          onEvent(event);
        }
      }
    } finally {
      reader.releaseLock();
    }
  }
}
