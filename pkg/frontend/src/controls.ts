/**
 * Button enablement is a pure function of the mirrored job phase; nothing
 * else may switch controls on or off.
 */

import type { Phase } from "./protocol.js";

export type Action = "load" | "start" | "pause" | "resume" | "stop";

export const ALL_ACTIONS: readonly Action[] = ["load", "start", "pause", "resume", "stop"];

const ENABLEMENT: Record<Phase, readonly Action[]> = {
  Empty: ["load"],
  Loaded: ["start"],
  Running: ["pause", "stop"],
  Paused: ["resume", "stop"],
  Finished: ["load"],
  Faulted: ["load"],
};

export function enabledActions(phase: Phase | null): ReadonlySet<Action> {
  if (phase === null) {
    return new Set<Action>();
  }
  return new Set(ENABLEMENT[phase]);
}

export function isEnabled(action: Action, phase: Phase | null): boolean {
  return enabledActions(phase).has(action);
}
