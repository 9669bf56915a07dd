/** Front-panel wiring: stream consumption, polling, buttons, screen editor. */
import { ServiceClient } from "./client.js";
import { ALL_ACTIONS, isEnabled } from "./controls.js";
import { DiagramRenderer, FULL_DIAGRAM, screenViewport } from "./diagram.js";
import { applyEvent, applySnapshot, connectionLost, displayedCounters, displayedTotals, initialState, } from "./viewmodel.js";
const client = new ServiceClient("");
let state = initialState();
let bundle = null;
let zoomToScreen = true;
const canvas = document.getElementById("diagram");
const renderer = new DiagramRenderer(canvas);
const el = (id) => document.getElementById(id);
const banner = el("banner");
const countersBody = el("counters-body");
const status = el("status");
const gapNote = el("gap-note");
const jobText = el("job-text");
const screenText = el("screen-text");
const screenResult = el("screen-result");
const speedSlider = el("speed");
const speedLabel = el("speed-label");
function setState(next) {
    state = next;
    redraw();
}
function redraw() {
    banner.classList.toggle("hidden", state.connection !== "lost");
    gapNote.classList.toggle("hidden", !state.gapSeen);
    const totals = displayedTotals(state);
    const snap = state.snapshot;
    status.textContent = snap
        ? `${snap.phase} — ${totals.processed}/${totals.total} LEDs` +
            (snap.job_name ? ` (${snap.job_name})` : "") +
            (snap.fault ? ` — fault: ${snap.fault}` : "")
        : "connecting…";
    const counters = displayedCounters(state);
    const rows = Object.entries(counters)
        .map(([bin, n]) => `<tr><td>${bin}</td><td>${n}</td></tr>`)
        .join("");
    countersBody.innerHTML =
        rows +
            `<tr class="dim"><td>REJECT</td><td>${totals.rejects}</td></tr>` +
            `<tr class="dim"><td>overflow</td><td>${totals.overflows}</td></tr>`;
    for (const action of ALL_ACTIONS) {
        el(`btn-${action}`).disabled = !isEnabled(action, state.phase);
    }
    renderer.render(bundle, state.points, zoomToScreen ? screenViewport(bundle) : FULL_DIAGRAM);
}
async function refreshBundle() {
    bundle = await client.plotdata();
    redraw();
}
async function refreshSnapshot() {
    try {
        const snap = await client.state();
        // read `state` only after the await: events applied while the fetch was
        // in flight must not be clobbered by a stale capture
        setState(applySnapshot(state, snap));
    }
    catch {
        setState(connectionLost(state));
    }
}
async function consumeTelemetry() {
    for (;;) {
        try {
            await client.streamTelemetry((event) => setState(applyEvent(state, event)));
        }
        catch {
            setState(connectionLost(state));
        }
        await new Promise((resolve) => setTimeout(resolve, 1500));
    }
}
function surface(err) {
    status.textContent = String(err instanceof Error ? err.message : err);
}
async function act(action) {
    try {
        if (action === "load") {
            await client.postJob(jobText.value);
        }
        else {
            await client.control(action);
        }
        await refreshSnapshot();
    }
    catch (err) {
        surface(err); // service rejections verbatim
    }
}
for (const action of ALL_ACTIONS) {
    el(`btn-${action}`).addEventListener("click", () => void act(action));
}
speedSlider.addEventListener("change", () => {
    const speed = Number(speedSlider.value);
    speedLabel.textContent = speed === 0 ? "max" : `${speed}×`;
    void client.setSpeed(speed).then(() => refreshSnapshot(), surface);
});
el("btn-screen-save").addEventListener("click", () => {
    void client.putScreen(screenText.value).then(async (result) => {
        screenResult.textContent = result.ok
            ? "screen accepted"
            : [result.error, ...result.diagnostics].filter(Boolean).join("\n");
        screenResult.classList.toggle("error", !result.ok);
        if (result.ok)
            await refreshBundle();
    }, surface);
});
el("btn-screen-fetch").addEventListener("click", () => {
    void client.screenDocument().then((doc) => {
        screenText.value = doc;
    }, surface);
});
el("zoom-toggle").addEventListener("change", (ev) => {
    zoomToScreen = ev.target.checked;
    redraw();
});
void refreshBundle().catch(surface);
void refreshSnapshot();
void consumeTelemetry();
setInterval(() => void refreshSnapshot(), 750);
