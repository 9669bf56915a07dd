/**
 * Button enablement is a pure function of the mirrored job phase; nothing
 * else may switch controls on or off.
 */
export const ALL_ACTIONS = ["load", "start", "pause", "resume", "stop"];
const ENABLEMENT = {
    Empty: ["load"],
    Loaded: ["start"],
    Running: ["pause", "stop"],
    Paused: ["resume", "stop"],
    Finished: ["load"],
    Faulted: ["load"],
};
export function enabledActions(phase) {
    if (phase === null) {
        return new Set();
    }
    return new Set(ENABLEMENT[phase]);
}
export function isEnabled(action, phase) {
    return enabledActions(phase).has(action);
}
