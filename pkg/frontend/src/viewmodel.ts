/**
 * Front-panel state mirror. The view model never invents numbers: counters
 * and progress come from service snapshots, points come from measurement
 * events, and a gap marker flags that the point buffer is incomplete until
 * the next snapshot arrives.
 */

import type {
  MeasurementEvent,
  Phase,
  Snapshot,
  TelemetryEvent,
} from "./protocol.js";

export type Connection = "connecting" | "live" | "lost";

export const DEFAULT_POINT_BUFFER = 2000;

export interface ViewModelState {
  connection: Connection;
  snapshot: Snapshot | null;
  phase: Phase | null;
  points: MeasurementEvent[];
  bufferLimit: number;
  gapSeen: boolean;
  lastSeq: number;
  phaseLog: Phase[];
}

export function initialState(bufferLimit: number = DEFAULT_POINT_BUFFER): ViewModelState {
  return {
    connection: "connecting",
    snapshot: null,
    phase: null,
    points: [],
    bufferLimit,
    gapSeen: false,
    lastSeq: 0,
    phaseLog: [],
  };
}

/** Replace the mirror with a freshly fetched snapshot. */
export function applySnapshot(state: ViewModelState, snap: Snapshot): ViewModelState {
  const phaseLog =
    state.phase === snap.phase ? state.phaseLog : [...state.phaseLog, snap.phase];
  return {
    ...state,
    connection: "live",
    snapshot: snap,
    phase: snap.phase,
    phaseLog,
  };
}

export function applyEvent(state: ViewModelState, event: TelemetryEvent): ViewModelState {
  if (event.type === "snapshot") {
    const { type: _type, ...snap } = event;
    return applySnapshot(state, snap as Snapshot);
  }
  if (event.type === "gap") {
    return { ...state, gapSeen: true };
  }
  if (typeof event.seq === "number") {
    if (event.seq <= state.lastSeq) {
      return state; // stale or duplicated event; stream contract says drop it
    }
    state = { ...state, lastSeq: event.seq };
  }
  if (event.type === "measurement") {
    // New job (index restarts) clears the previous run's points and gap flag.
    const fresh = event.index === 1;
    const points = fresh ? [] : [...state.points];
    points.push(event);
    if (points.length > state.bufferLimit) {
      points.splice(0, points.length - state.bufferLimit);
    }
    return { ...state, points, gapSeen: fresh ? false : state.gapSeen };
  }
  if (event.type === "phase") {
    const snapshot = state.snapshot
      ? {
          ...state.snapshot,
          phase: event.phase,
          processed: event.processed,
          total: event.total,
          job_id: event.job_id,
        }
      : state.snapshot;
    const fresh = event.phase === "Loaded";
    return {
      ...state,
      snapshot,
      phase: event.phase,
      points: fresh ? [] : state.points,
      gapSeen: fresh ? false : state.gapSeen,
      phaseLog: [...state.phaseLog, event.phase],
    };
  }
  return state;
}

export function connectionLost(state: ViewModelState): ViewModelState {
  // Keep the last frame; only the banner changes.
  return { ...state, connection: "lost" };
}

/** Counters to render: always the latest snapshot's, never the point count. */
export function displayedCounters(state: ViewModelState): Record<string, number> {
  return state.snapshot ? state.snapshot.counters : {};
}

export function displayedTotals(state: ViewModelState): {
  processed: number;
  total: number;
  rejects: number;
  overflows: number;
} {
  const s = state.snapshot;
  return {
    processed: s?.processed ?? 0,
    total: s?.total ?? 0,
    rejects: s?.rejects ?? 0,
    overflows: s?.overflows ?? 0,
  };
}
