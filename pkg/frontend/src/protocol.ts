/** Wire types shared by both transports, with a defensive runtime parser. */

export interface WorldBlock {
  x: number;
  y: number;
  z: number;
  /** Marker color, or "none" for an ordinary block. */
  color: string;
}

export interface WorldMessage {
  type: "world";
  blocks: WorldBlock[];
}

export interface InstructionMessage {
  type: "instruction";
  id: number;
  text: string;
}

export const FEEDBACK_KINDS = [
  "correct",
  "mistake",
  "remove",
  "replace",
  "object-complete",
  "success",
  "timeout",
] as const;

export type FeedbackKind = (typeof FEEDBACK_KINDS)[number];

export interface FeedbackMessage {
  type: "feedback";
  kind: FeedbackKind;
  text: string;
}

export interface ErrorMessage {
  type: "error";
  text: string;
}

export type ServerMessage =
  | WorldMessage
  | InstructionMessage
  | FeedbackMessage
  | ErrorMessage;

export interface BuildEvent {
  type: "place" | "remove";
  x: number;
  y: number;
  z: number;
}

export interface ScenarioCatalog {
  scenarios: string[];
  strategies: string[];
}

export interface SessionOpened {
  sessionId: string;
  next: number;
}

export interface MessageBatch {
  messages: ServerMessage[];
  next: number;
}

export interface SessionMetrics {
  successful: boolean;
  durationSteps: number;
  mistakes: number;
  perObjectSteps: Record<string, number>;
  placements: number;
}

export interface SessionStatus {
  terminated: boolean;
  succeeded: boolean;
  metrics: SessionMetrics;
}

export class ProtocolError extends Error {}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function asNumber(value: unknown, where: string): number {
  if (typeof value !== "number" || !Number.isFinite(value)) {
    throw new ProtocolError(`${where} is not a number`);
  }
  return value;
}

function asString(value: unknown, where: string): string {
  if (typeof value !== "string") {
    throw new ProtocolError(`${where} is not a string`);
  }
  return value;
}

/** Narrow one decoded JSON value to a ServerMessage or throw ProtocolError. */
export function parseServerMessage(raw: unknown): ServerMessage {
  if (!isRecord(raw)) {
    throw new ProtocolError("message is not an object");
  }
  switch (raw.type) {
    case "world": {
      if (!Array.isArray(raw.blocks)) {
        throw new ProtocolError("world message has no block list");
      }
      const blocks = raw.blocks.map((entry, index): WorldBlock => {
        if (!isRecord(entry)) {
          throw new ProtocolError(`block ${index} is not an object`);
        }
        return {
          x: asNumber(entry.x, `block ${index} x`),
          y: asNumber(entry.y, `block ${index} y`),
          z: asNumber(entry.z, `block ${index} z`),
          color: asString(entry.color, `block ${index} color`),
        };
      });
      return { type: "world", blocks };
    }
    case "instruction":
      return {
        type: "instruction",
        id: asNumber(raw.id, "instruction id"),
        text: asString(raw.text, "instruction text"),
      };
    case "feedback": {
      const kind = asString(raw.kind, "feedback kind");
      if (!(FEEDBACK_KINDS as readonly string[]).includes(kind)) {
        throw new ProtocolError(`unknown feedback kind ${kind}`);
      }
      return {
        type: "feedback",
        kind: kind as FeedbackKind,
        text: asString(raw.text, "feedback text"),
      };
    }
    case "error":
      return { type: "error", text: asString(raw.text, "error text") };
    default:
      throw new ProtocolError(`unknown message type ${String(raw.type)}`);
  }
}
