import { describe, expect, it } from "vitest";

import type { ServerMessage } from "../src/protocol.js";
import {
  PollingTransport,
  SocketTransport,
  type SocketLike,
  type TransportHooks,
} from "../src/transport.js";

function collector(): TransportHooks & { messages: ServerMessage[]; errors: string[] } {
  const messages: ServerMessage[] = [];
  const errors: string[] = [];
  return {
    messages,
    errors,
    onMessage: (m) => messages.push(m),
    onError: (t) => errors.push(t),
  };
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("PollingTransport", () => {
  it("opens a session, drains with an advancing cursor, and sends events", async () => {
    const calls: Array<{ url: string; body?: string }> = [];
    const stream = [
      { type: "world", blocks: [] },
      { type: "instruction", id: 0, text: "Go." },
      { type: "feedback", kind: "correct", text: "Correct!" },
    ];
    let served = 0;
    const fetchFn = async (url: string, init?: RequestInit): Promise<Response> => {
      calls.push({ url, body: init?.body as string | undefined });
      if (url.endsWith("/api/sessions")) {
        return jsonResponse(200, { sessionId: "abc123", next: 2 });
      }
      if (url.includes("/messages?after=")) {
        const after = Number(url.split("after=")[1]);
        expect(after).toBe(served);
        const upto = Math.min(stream.length, after === 0 ? 2 : 3);
        const batch = stream.slice(after, upto);
        served = upto;
        return jsonResponse(200, { messages: batch, next: upto });
      }
      if (url.endsWith("/events")) {
        return jsonResponse(200, { accepted: true, next: 3 });
      }
      throw new Error(`unexpected url ${url}`);
    };

    const hooks = collector();
    const transport = new PollingTransport("http://server", hooks, {
      fetchFn,
      intervalMs: 60_000,
    });
    await transport.start("mini-bridge", "high-level");
    expect(transport.sessionId).toBe("abc123");
    expect(hooks.messages.map((m) => m.type)).toEqual(["world", "instruction"]);

    await transport.send({ type: "place", x: 0, y: 1, z: 1 });
    expect(hooks.messages.map((m) => m.type)).toEqual([
      "world",
      "instruction",
      "feedback",
    ]);
    expect(hooks.errors).toEqual([]);
    const eventCall = calls.find((c) => c.url.endsWith("/events"));
    expect(JSON.parse(eventCall?.body ?? "{}")).toEqual({
      type: "place",
      x: 0,
      y: 1,
      z: 1,
    });
    transport.close();
  });

  it("routes HTTP error details to onError", async () => {
    const fetchFn = async (url: string): Promise<Response> => {
      if (url.endsWith("/api/sessions")) {
        return jsonResponse(200, { sessionId: "abc123", next: 0 });
      }
      if (url.includes("/messages")) {
        return jsonResponse(200, { messages: [], next: 0 });
      }
      return jsonResponse(409, { detail: "session is over" });
    };
    const hooks = collector();
    const transport = new PollingTransport("", hooks, {
      fetchFn,
      intervalMs: 60_000,
    });
    await transport.start("bridge", "teaching");
    await transport.send({ type: "place", x: 9, y: 9, z: 9 });
    expect(hooks.errors).toEqual(["session is over"]);
    transport.close();
  });

  it("reports a failed session open", async () => {
    const fetchFn = async (): Promise<Response> =>
      jsonResponse(400, { detail: "unknown scenario" });
    const transport = new PollingTransport("", collector(), { fetchFn });
    await expect(transport.start("nope", "high-level")).rejects.toThrow(
      "unknown scenario",
    );
  });
});

class FakeSocket implements SocketLike {
  sent: string[] = [];
  listeners = new Map<string, Array<(event: any) => void>>();
  closed = false;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closed = true;
  }

  addEventListener(type: string, cb: (event: any) => void): void {
    const existing = this.listeners.get(type) ?? [];
    existing.push(cb);
    this.listeners.set(type, existing);
  }

  emit(type: string, event: unknown): void {
    for (const cb of this.listeners.get(type) ?? []) {
      cb(event);
    }
  }
}

describe("SocketTransport", () => {
  async function started(): Promise<{
    socket: FakeSocket;
    hooks: ReturnType<typeof collector>;
    transport: SocketTransport;
  }> {
    const socket = new FakeSocket();
    const hooks = collector();
    const transport = new SocketTransport("http://server", hooks, {
      socketFactory: (url) => {
        expect(url).toBe("ws://server/ws");
        return socket;
      },
    });
    const starting = transport.start("mini-bridge", "low-level");
    socket.emit("open", {});
    await starting;
    return { socket, hooks, transport };
  }

  it("sends the start frame first and routes messages", async () => {
    const { socket, hooks, transport } = await started();
    expect(JSON.parse(socket.sent[0] ?? "{}")).toEqual({
      type: "start",
      scenario: "mini-bridge",
      strategy: "low-level",
    });
    socket.emit("message", { data: JSON.stringify({ type: "world", blocks: [] }) });
    socket.emit("message", {
      data: JSON.stringify({ type: "instruction", id: 0, text: "Go." }),
    });
    expect(hooks.messages.map((m) => m.type)).toEqual(["world", "instruction"]);

    await transport.send({ type: "remove", x: 1, y: 2, z: 3 });
    expect(JSON.parse(socket.sent[1] ?? "{}")).toEqual({
      type: "remove",
      x: 1,
      y: 2,
      z: 3,
    });
  });

  it("routes error envelopes and junk to onError, never to onMessage", async () => {
    const { socket, hooks } = await started();
    socket.emit("message", {
      data: JSON.stringify({ type: "error", text: "first message must be start" }),
    });
    socket.emit("message", { data: "not json" });
    expect(hooks.messages).toEqual([]);
    expect(hooks.errors[0]).toBe("first message must be start");
    expect(hooks.errors).toHaveLength(2);
  });

  it("closes the underlying socket", async () => {
    const { socket, transport } = await started();
    transport.close();
    expect(socket.closed).toBe(true);
  });
});
