/**
 * Wire types of the operator service (protocol v1) and NDJSON decoding.
 * Every document the service authors carries `v: 1`; telemetry events share
 * one strictly increasing `seq`.
 */

export type Phase = "Empty" | "Loaded" | "Running" | "Paused" | "Finished" | "Faulted";

export interface MeasurementEvent {
  v: number;
  seq: number;
  type: "measurement";
  index: number;
  job_id: string | null;
  led_id: string;
  x: number;
  y: number;
  lumens: number;
  chroma_bin: string;
  lum_class: string;
  reject: boolean;
  destination: string;
  compartment: number | null;
  overflowed: boolean;
  cycle_time_s: number;
}

export interface PhaseEvent {
  v: number;
  seq: number;
  type: "phase";
  phase: Phase;
  job_id: string | null;
  processed: number;
  total: number;
}

export interface GapEvent {
  v: number;
  seq?: number;
  type: "gap";
  dropped: number;
}

export interface Snapshot {
  v: number;
  phase: Phase;
  job_id: string | null;
  job_name: string | null;
  processed: number;
  total: number;
  live: MeasurementEvent | Record<string, unknown> | null;
  counters: Record<string, number>;
  rejects: number;
  overflows: number;
  screen: string;
  speed: number;
  fault: string | null;
  report_available: boolean;
}

/** First line of the telemetry stream: the snapshot at subscribe time. */
export type SnapshotEvent = Snapshot & { type: "snapshot" };

export type TelemetryEvent = MeasurementEvent | PhaseEvent | GapEvent | SnapshotEvent;

export interface PlotBundle {
  v: number;
  observer: string;
  locus: { wavelength_nm: number; x: number; y: number }[];
  ellipses: [number, number][][];
  bins: { id: string; outline: [number, number][] }[];
  points: unknown[];
}

/**
 * Incremental NDJSON decoder: feed chunks, get completed events back.
 * Blank lines are stream keepalives and are skipped.
 */
export function decodeNdjson(
  carry: string,
  chunk: string,
): { events: TelemetryEvent[]; carry: string } {
  const buffer = carry + chunk;
  const lines = buffer.split("\n");
  const rest = lines.pop() ?? "";
  const events: TelemetryEvent[] = [];
  for (const line of lines) {
    const trimmed = line.trim();
    if (!trimmed) continue;
    events.push(JSON.parse(trimmed) as TelemetryEvent);
  }
  return { events, carry: rest };
}
