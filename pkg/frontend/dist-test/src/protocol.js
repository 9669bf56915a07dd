/**
 * Wire types of the operator service (protocol v1) and NDJSON decoding.
 * Every document the service authors carries `v: 1`; telemetry events share
 * one strictly increasing `seq`.
 */
/**
 * Incremental NDJSON decoder: feed chunks, get completed events back.
 * Blank lines are stream keepalives and are skipped.
 */
export function decodeNdjson(carry, chunk) {
    const buffer = carry + chunk;
    const lines = buffer.split("\n");
    const rest = lines.pop() ?? "";
    const events = [];
    for (const line of lines) {
        const trimmed = line.trim();
        if (!trimmed)
            continue;
        events.push(JSON.parse(trimmed));
    }
    return { events, carry: rest };
}
