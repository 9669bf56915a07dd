import assert from "node:assert/strict";
import { test } from "node:test";
import { decodeNdjson } from "../src/protocol.js";
test("decodes complete lines and carries the partial tail", () => {
    const { events, carry } = decodeNdjson("", '{"v":1,"seq":1,"type":"gap","dropped":2}\n{"v":1,"seq":2,"ty');
    assert.equal(events.length, 1);
    assert.deepEqual(events[0], { v: 1, seq: 1, type: "gap", dropped: 2 });
    assert.equal(carry, '{"v":1,"seq":2,"ty');
});
test("joins a carried fragment with the next chunk", () => {
    const first = decodeNdjson("", '{"v":1,"seq":3,"type":"pha');
    const second = decodeNdjson(first.carry, 'se","phase":"Running","job_id":null,"processed":0,"total":5}\n');
    assert.equal(first.events.length, 0);
    assert.equal(second.events.length, 1);
    assert.equal(second.events[0]?.type, "phase");
    assert.equal(second.carry, "");
});
test("keepalive blank lines are skipped", () => {
    const { events, carry } = decodeNdjson("", "\n\n\n");
    assert.equal(events.length, 0);
    assert.equal(carry, "");
});
test("multiple events in one chunk stay ordered", () => {
    const chunk = '{"v":1,"seq":1,"type":"gap","dropped":1}\n' +
        '{"v":1,"seq":2,"type":"gap","dropped":2}\n' +
        '{"v":1,"seq":3,"type":"gap","dropped":3}\n';
    const { events } = decodeNdjson("", chunk);
    assert.deepEqual(events.map((e) => ("seq" in e ? e.seq : undefined)), [1, 2, 3]);
});
