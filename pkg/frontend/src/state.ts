/** Pure session state: every server message folds into a new AppState. */

import type { FeedbackKind, ServerMessage } from "./protocol.js";

export interface AppState {
  /** Occupied cells, keyed "x,y,z", value is the marker color or "none". */
  blocks: ReadonlyMap<string, string>;
  instruction: string | null;
  instructionId: number | null;
  feedback: { kind: FeedbackKind; text: string } | null;
  transportError: string | null;
  mistakes: number;
  /** Count of blocks the builder placed (world snapshots that grew). */
  placements: number;
  seenWorld: boolean;
  completed: boolean;
  succeeded: boolean;
}

export function initialState(): AppState {
  return {
    blocks: new Map(),
    instruction: null,
    instructionId: null,
    feedback: null,
    transportError: null,
    mistakes: 0,
    placements: 0,
    seenWorld: false,
    completed: false,
    succeeded: false,
  };
}

export function cellKey(x: number, y: number, z: number): string {
  return `${x},${y},${z}`;
}

export function reduce(state: AppState, message: ServerMessage): AppState {
  switch (message.type) {
    case "world": {
      const blocks = new Map<string, string>();
      for (const block of message.blocks) {
        blocks.set(cellKey(block.x, block.y, block.z), block.color);
      }
      const grew = state.seenWorld && blocks.size > state.blocks.size;
      return {
        ...state,
        blocks,
        seenWorld: true,
        placements: state.placements + (grew ? 1 : 0),
      };
    }
    case "instruction":
      return {
        ...state,
        instruction: message.text,
        instructionId: message.id,
      };
    case "feedback": {
      const next: AppState = {
        ...state,
        feedback: { kind: message.kind, text: message.text },
      };
      if (message.kind === "mistake") {
        next.mistakes = state.mistakes + 1;
      }
      if (message.kind === "success") {
        next.completed = true;
        next.succeeded = true;
      }
      if (message.kind === "timeout") {
        next.completed = true;
      }
      return next;
    }
    case "error":
      return { ...state, transportError: message.text };
  }
}

export interface GridBounds {
  minX: number;
  maxX: number;
  minY: number;
  maxY: number;
  minZ: number;
  maxZ: number;
}

/** Clickable area: the occupied bounding box padded by a margin. */
export function gridBounds(
  blocks: ReadonlyMap<string, string>,
  margin = 2,
): GridBounds {
  if (blocks.size === 0) {
    return { minX: -margin, maxX: margin, minY: 0, maxY: margin, minZ: -margin, maxZ: margin };
  }
  let minX = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  let minZ = Infinity;
  let maxZ = -Infinity;
  for (const key of blocks.keys()) {
    const parts = key.split(",").map(Number) as [number, number, number];
    const [x, y, z] = parts;
    minX = Math.min(minX, x);
    maxX = Math.max(maxX, x);
    maxY = Math.max(maxY, y);
    minZ = Math.min(minZ, z);
    maxZ = Math.max(maxZ, z);
  }
  return {
    minX: minX - margin,
    maxX: maxX + margin,
    minY: 0,
    maxY: maxY + 1,
    minZ: minZ - margin,
    maxZ: maxZ + margin,
  };
}
