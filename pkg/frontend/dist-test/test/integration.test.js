/**
 * Live-service acceptance: a scripted 20-LED job at speed 10 driven through
 * the real operator service. The diagram's data source (the view-model point
 * buffer) must show all 20 points, counters must match the final snapshot,
 * and button enablement must follow the phase machine at every transition.
 */
import assert from "node:assert/strict";
import { spawn } from "node:child_process";
import { mkdtempSync, writeFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { fileURLToPath } from "node:url";
import { after, before, test } from "node:test";
import { ServiceClient } from "../src/client.js";
import { enabledActions } from "../src/controls.js";
import { applyEvent, applySnapshot, displayedCounters, initialState, } from "../src/viewmodel.js";
// compiled location: frontend/dist-test/test/ -> repo root is four levels up
const REPO_ROOT = resolve(fileURLToPath(import.meta.url), "../../../..");
const SERVE_SCRIPT = join(REPO_ROOT, "scripts", "serve_operator.py");
const LOT_DOC = `lot panel
peak_nm 520.0
fwhm_nm 120.0
peak_power 1.0
sigma_peak_nm 1.0
sigma_fwhm_nm 2.0
sigma_power 0.05
count 20
seed 11
`;
// speed 10 on the 9 s cycle: one LED every 0.9 s, a watchable pace
const JOB_DOC = `job panel-job
mode Automated
lot panel.lot
seed 4
speed 10
`;
// The screen is centred on the lot's chromaticity (0.2584, 0.4375).
const SCREEN_DOC = `screen panel-screen
observer CIE1931_2deg
bin R0C0
  0.2504 0.4295
  0.2584 0.4295
  0.2584 0.4375
  0.2504 0.4375
bin R0C1
  0.2584 0.4295
  0.2664 0.4295
  0.2664 0.4375
  0.2584 0.4375
bin R1C0
  0.2504 0.4375
  0.2584 0.4375
  0.2584 0.4455
  0.2504 0.4455
bin R1C1
  0.2584 0.4375
  0.2664 0.4375
  0.2664 0.4455
  0.2584 0.4455
lumclass ALL 0 inf
`;
// JobState phase machine: Empty -> Loaded -> Running <-> Paused -> Finished.
const LEGAL_TRANSITIONS = {
    Empty: ["Loaded", "Faulted"],
    Loaded: ["Running", "Loaded", "Faulted"],
    Running: ["Paused", "Finished", "Faulted"],
    Paused: ["Running", "Finished", "Faulted"],
    Finished: ["Loaded", "Faulted"],
    Faulted: ["Loaded"],
};
const EXPECTED_ENABLEMENT = {
    Empty: ["load"],
    Loaded: ["start"],
    Running: ["pause", "stop"],
    Paused: ["resume", "stop"],
    Finished: ["load"],
    Faulted: ["load"],
};
let assets;
let proc;
let base = "";
function startService() {
    return new Promise((resolvePromise, rejectPromise) => {
        proc = spawn("python3", ["-u", SERVE_SCRIPT, "--addr", "127.0.0.1:0", "--assets", assets, "--reports", join(assets, "reports")], { stdio: ["ignore", "pipe", "pipe"] });
        let out = "";
        const timer = setTimeout(() => rejectPromise(new Error(`service did not announce its address; got: ${out}`)), 20_000);
        proc.stdout?.on("data", (chunk) => {
            out += chunk.toString();
            const match = out.match(/listening on (http:\/\/[\d.]+:\d+)/);
            if (match?.[1]) {
                clearTimeout(timer);
                resolvePromise(match[1]);
            }
        });
        proc.stderr?.on("data", (chunk) => {
            out += chunk.toString();
        });
        proc.on("exit", (code) => {
            clearTimeout(timer);
            rejectPromise(new Error(`service exited early (${code}): ${out}`));
        });
    });
}
before(async () => {
    assets = mkdtempSync(join(tmpdir(), "ledsort-panel-"));
    writeFileSync(join(assets, "panel.lot"), LOT_DOC);
    base = await startService();
});
after(() => {
    proc?.kill();
    rmSync(assets, { recursive: true, force: true });
});
test("live service: 20-LED job at speed 10 drives the panel correctly", async () => {
    const client = new ServiceClient(base);
    assert.equal((await client.health()).status, "ok");
    // stage the screen the lot was scripted against
    const screenResult = await client.putScreen(SCREEN_DOC);
    assert.equal(screenResult.ok, true);
    let state = initialState();
    const observedPhases = [];
    const seqs = [];
    let finished;
    const done = new Promise((r) => {
        finished = r;
    });
    let streamOpen;
    const helloSeen = new Promise((r) => {
        streamOpen = r;
    });
    const abort = new AbortController();
    const streaming = client
        .streamTelemetry((event) => {
        state = applyEvent(state, event);
        if (event.type === "snapshot")
            streamOpen();
        if ("seq" in event && typeof event.seq === "number")
            seqs.push(event.seq);
        if (event.type === "phase") {
            observedPhases.push(event.phase);
            if (event.phase === "Finished")
                finished();
        }
    }, abort.signal)
        .catch(() => undefined); // aborted at the end of the test
    await helloSeen; // subscription is live before any job activity
    let snap = await client.state();
    state = applySnapshot(state, snap); // state read after the await; no stale capture
    assert.equal(state.phase, "Empty");
    assert.deepEqual([...enabledActions(state.phase)], ["load"]);
    await client.postJob(JOB_DOC);
    snap = await client.state();
    state = applySnapshot(state, snap);
    assert.equal(state.phase, "Loaded");
    assert.deepEqual([...enabledActions(state.phase)], ["start"]);
    await client.control("start");
    snap = await client.state();
    state = applySnapshot(state, snap);
    assert.equal(state.phase, "Running");
    // exercise pause/resume mid-run (one LED lands every 0.9 s)
    await new Promise((r) => setTimeout(r, 2500));
    const paused = await client.control("pause");
    assert.equal(paused.phase, "Paused");
    state = applySnapshot(state, paused);
    assert.deepEqual([...enabledActions(state.phase)].sort(), ["resume", "stop"]);
    await new Promise((r) => setTimeout(r, 500));
    const resumed = await client.control("resume");
    assert.equal(resumed.phase, "Running");
    state = applySnapshot(state, resumed);
    assert.deepEqual([...enabledActions(state.phase)].sort(), ["pause", "stop"]);
    await done; // Finished phase event seen on the stream
    // the diagram's data source shows all 20 points
    assert.equal(state.points.length, 20);
    assert.deepEqual(state.points.map((p) => p.index), Array.from({ length: 20 }, (_, i) => i + 1));
    assert.equal(state.gapSeen, false);
    // events arrived strictly ordered
    for (let i = 1; i < seqs.length; i++) {
        assert.ok(seqs[i] > seqs[i - 1], "telemetry seq must increase");
    }
    // counters rendered equal the final snapshot, and the books balance
    const finalSnapshot = await client.state();
    state = applySnapshot(state, finalSnapshot);
    assert.equal(finalSnapshot.phase, "Finished");
    assert.deepEqual(displayedCounters(state), finalSnapshot.counters);
    const bucketed = Object.values(finalSnapshot.counters).reduce((a, b) => a + b, 0) +
        finalSnapshot.rejects +
        finalSnapshot.overflows;
    assert.equal(bucketed, 20);
    assert.equal(finalSnapshot.processed, 20);
    // points only ever claim bins that exist on the active screen
    const binIds = new Set(["R0C0", "R0C1", "R1C0", "R1C1", "REJECT"]);
    for (const p of state.points) {
        assert.ok(binIds.has(p.chroma_bin), `unexpected bin ${p.chroma_bin}`);
    }
    // every observed transition is legal and enablement tracked each phase
    const fullLog = ["Empty", ...observedPhases];
    for (let i = 1; i < fullLog.length; i++) {
        const from = fullLog[i - 1];
        const to = fullLog[i];
        if (from === to)
            continue;
        assert.ok(LEGAL_TRANSITIONS[from].includes(to), `illegal transition ${from} -> ${to}`);
    }
    for (const phase of fullLog) {
        assert.deepEqual([...enabledActions(phase)].sort(), [...EXPECTED_ENABLEMENT[phase]].sort(), `enablement at ${phase}`);
    }
    assert.ok(observedPhases.includes("Paused"), "pause was observed");
    // report is downloadable once finished
    const summary = await client.reportSummary();
    assert.ok(summary !== null && summary.includes("count 20"));
    abort.abort();
    await streaming;
});
