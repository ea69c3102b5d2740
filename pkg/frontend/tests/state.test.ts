import { describe, expect, it } from "vitest";

import type { ServerMessage } from "../src/protocol.js";
import { cellKey, gridBounds, initialState, reduce } from "../src/state.js";

function world(...blocks: Array<[number, number, number, string]>): ServerMessage {
  return {
    type: "world",
    blocks: blocks.map(([x, y, z, color]) => ({ x, y, z, color })),
  };
}

describe("reduce", () => {
  it("replaces the block map on world snapshots", () => {
    let state = initialState();
    state = reduce(state, world([0, 1, 0, "blue"], [1, 1, 0, "none"]));
    expect(state.blocks.get(cellKey(0, 1, 0))).toBe("blue");
    expect(state.blocks.get(cellKey(1, 1, 0))).toBe("none");
    expect(state.blocks.size).toBe(2);
  });

  it("counts placements from growth, not the opening snapshot", () => {
    let state = initialState();
    state = reduce(state, world([0, 1, 0, "blue"], [1, 1, 0, "none"]));
    expect(state.placements).toBe(0);
    state = reduce(state, world([0, 1, 0, "blue"], [1, 1, 0, "none"], [2, 1, 0, "none"]));
    expect(state.placements).toBe(1);
    state = reduce(state, world([0, 1, 0, "blue"], [2, 1, 0, "none"]));
    expect(state.placements).toBe(1);
  });

  it("tracks the latest instruction", () => {
    let state = initialState();
    state = reduce(state, { type: "instruction", id: 0, text: "Put a block." });
    state = reduce(state, { type: "instruction", id: 1, text: "Build a railing." });
    expect(state.instruction).toBe("Build a railing.");
    expect(state.instructionId).toBe(1);
  });

  it("counts mistakes and keeps other feedback from touching the counter", () => {
    let state = initialState();
    state = reduce(state, { type: "feedback", kind: "mistake", text: "No." });
    state = reduce(state, { type: "feedback", kind: "remove", text: "Take it out." });
    state = reduce(state, { type: "feedback", kind: "correct", text: "Yes." });
    state = reduce(state, { type: "feedback", kind: "mistake", text: "No again." });
    expect(state.mistakes).toBe(2);
    expect(state.feedback).toEqual({ kind: "mistake", text: "No again." });
    expect(state.completed).toBe(false);
  });

  it("completes on success and timeout", () => {
    const success = reduce(initialState(), {
      type: "feedback",
      kind: "success",
      text: "Done!",
    });
    expect(success.completed).toBe(true);
    expect(success.succeeded).toBe(true);

    const timeout = reduce(initialState(), {
      type: "feedback",
      kind: "timeout",
      text: "Time is up.",
    });
    expect(timeout.completed).toBe(true);
    expect(timeout.succeeded).toBe(false);
  });

  it("stores transport errors without touching session state", () => {
    let state = initialState();
    state = reduce(state, { type: "instruction", id: 0, text: "Go." });
    state = reduce(state, { type: "error", text: "socket closed" });
    expect(state.transportError).toBe("socket closed");
    expect(state.instruction).toBe("Go.");
  });

  it("never mutates the previous state", () => {
    const before = initialState();
    reduce(before, world([0, 1, 0, "blue"]));
    reduce(before, { type: "feedback", kind: "mistake", text: "x" });
    expect(before.blocks.size).toBe(0);
    expect(before.mistakes).toBe(0);
  });
});

describe("gridBounds", () => {
  it("gives a small default area for an empty world", () => {
    expect(gridBounds(new Map())).toEqual({
      minX: -2,
      maxX: 2,
      minY: 0,
      maxY: 2,
      minZ: -2,
      maxZ: 2,
    });
  });

  it("pads the occupied bounding box and keeps the ground visible", () => {
    const blocks = new Map([
      [cellKey(0, 1, 0), "blue"],
      [cellKey(3, 2, 5), "none"],
    ]);
    expect(gridBounds(blocks)).toEqual({
      minX: -2,
      maxX: 5,
      minY: 0,
      maxY: 3,
      minZ: -2,
      maxZ: 7,
    });
  });
});
