/** Two interchangeable session transports: HTTP polling and WebSocket.
 *
 * Both deliver the identical ordered message stream. Transport problems
 * (HTTP failures, {"type": "error"} envelopes) go to onError and never mix
 * into the session message flow.
 */

import {
  parseServerMessage,
  type BuildEvent,
  type MessageBatch,
  type ServerMessage,
  type SessionOpened,
  type SessionStatus,
} from "./protocol.js";

export interface TransportHooks {
  onMessage(message: ServerMessage): void;
  onError(text: string): void;
}

export interface Transport {
  readonly sessionId: string | null;
  start(scenario: string, strategy: string): Promise<void>;
  send(event: BuildEvent): Promise<void>;
  status(): Promise<SessionStatus | null>;
  close(): void;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface PollingOptions {
  fetchFn?: FetchLike;
  intervalMs?: number;
}

async function detailOf(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string") {
      return body.detail;
    }
  } catch {
    // fall through to the status line
  }
  return `HTTP ${response.status}`;
}

export class PollingTransport implements Transport {
  sessionId: string | null = null;
  private cursor = 0;
  private timer: ReturnType<typeof setInterval> | null = null;
  private draining = false;
  private readonly fetchFn: FetchLike;
  private readonly intervalMs: number;

  constructor(
    private readonly baseUrl: string,
    private readonly hooks: TransportHooks,
    options: PollingOptions = {},
  ) {
    this.fetchFn = options.fetchFn ?? globalThis.fetch.bind(globalThis);
    this.intervalMs = options.intervalMs ?? 250;
  }

  async start(scenario: string, strategy: string): Promise<void> {
    const response = await this.fetchFn(`${this.baseUrl}/api/sessions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ scenario, strategy }),
    });
    if (!response.ok) {
      throw new Error(await detailOf(response));
    }
    const opened = (await response.json()) as SessionOpened;
    this.sessionId = opened.sessionId;
    await this.poll();
    this.timer = setInterval(() => {
      void this.poll();
    }, this.intervalMs);
  }

  /** Drain new messages once; reentrancy-safe so timer and send can race. */
  async poll(): Promise<void> {
    if (this.sessionId === null || this.draining) {
      return;
    }
    this.draining = true;
    try {
      const response = await this.fetchFn(
        `${this.baseUrl}/api/sessions/${this.sessionId}/messages?after=${this.cursor}`,
      );
      if (!response.ok) {
        this.hooks.onError(await detailOf(response));
        return;
      }
      const batch = (await response.json()) as MessageBatch;
      this.cursor = batch.next;
      for (const raw of batch.messages) {
        const message = parseServerMessage(raw);
        if (message.type === "error") {
          this.hooks.onError(message.text);
        } else {
          this.hooks.onMessage(message);
        }
      }
    } catch (problem) {
      this.hooks.onError(String(problem));
    } finally {
      this.draining = false;
    }
  }

  async send(event: BuildEvent): Promise<void> {
    if (this.sessionId === null) {
      this.hooks.onError("session has not started");
      return;
    }
    try {
      const response = await this.fetchFn(
        `${this.baseUrl}/api/sessions/${this.sessionId}/events`,
        {
          method: "POST",
          headers: { "Content-Type": "application/json" },
          body: JSON.stringify(event),
        },
      );
      if (!response.ok) {
        this.hooks.onError(await detailOf(response));
        return;
      }
    } catch (problem) {
      this.hooks.onError(String(problem));
      return;
    }
    await this.poll();
  }

  async status(): Promise<SessionStatus | null> {
    if (this.sessionId === null) {
      return null;
    }
    const response = await this.fetchFn(
      `${this.baseUrl}/api/sessions/${this.sessionId}`,
    );
    if (!response.ok) {
      return null;
    }
    return (await response.json()) as SessionStatus;
  }

  close(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}

/** The subset of the browser WebSocket surface the transport relies on. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: "open" | "message" | "error" | "close", cb: (event: any) => void): void;
}

export interface SocketOptions {
  socketFactory?: (url: string) => SocketLike;
}

export class SocketTransport implements Transport {
  readonly sessionId: string | null = null;
  private socket: SocketLike | null = null;

  constructor(
    private readonly baseUrl: string,
    private readonly hooks: TransportHooks,
    private readonly options: SocketOptions = {},
  ) {}

  private makeSocket(url: string): SocketLike {
    if (this.options.socketFactory) {
      return this.options.socketFactory(url);
    }
    const WS = (globalThis as { WebSocket?: new (url: string) => SocketLike }).WebSocket;
    if (!WS) {
      throw new Error("WebSocket is not available in this environment");
    }
    return new WS(url);
  }

  async start(scenario: string, strategy: string): Promise<void> {
    const url = `${this.baseUrl.replace(/^http/, "ws") || "ws://" + location.host}/ws`;
    const socket = this.makeSocket(url);
    this.socket = socket;
    await new Promise<void>((resolve, reject) => {
      socket.addEventListener("open", () => resolve());
      socket.addEventListener("error", () => reject(new Error("socket failed to open")));
    });
    socket.addEventListener("message", (event: { data: string }) => {
      let decoded: unknown;
      try {
        decoded = JSON.parse(event.data);
        const message = parseServerMessage(decoded);
        if (message.type === "error") {
          this.hooks.onError(message.text);
        } else {
          this.hooks.onMessage(message);
        }
      } catch (problem) {
        this.hooks.onError(String(problem));
      }
    });
    socket.send(JSON.stringify({ type: "start", scenario, strategy }));
  }

  async send(event: BuildEvent): Promise<void> {
    if (this.socket === null) {
      this.hooks.onError("session has not started");
      return;
    }
    this.socket.send(JSON.stringify(event));
  }

  async status(): Promise<SessionStatus | null> {
    return null;
  }

  close(): void {
    this.socket?.close();
    this.socket = null;
  }
}
