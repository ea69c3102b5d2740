/** Wires catalog, transport, reducer, and view together. */

import type { ScenarioCatalog, ServerMessage, SessionStatus } from "./protocol.js";
import { initialState, reduce, type AppState } from "./state.js";
import {
  PollingTransport,
  SocketTransport,
  type Transport,
  type TransportHooks,
} from "./transport.js";
import { bindHandlers, render, type Phase, type ViewModel } from "./view.js";

export interface AppOptions {
  /** Server origin, e.g. "http://127.0.0.1:8000"; empty for same-origin. */
  baseUrl?: string;
  pollIntervalMs?: number;
}

export interface AppController {
  /** Current immutable state, for tests and debugging. */
  readonly state: AppState;
  readonly transport: Transport | null;
  dispose(): void;
}

export async function mountApp(
  root: HTMLElement,
  options: AppOptions = {},
): Promise<AppController> {
  const baseUrl = options.baseUrl ?? "";
  let state = initialState();
  let phase: Phase = "setup";
  let catalog: ScenarioCatalog | null = null;
  let catalogError: string | null = null;
  let transport: Transport | null = null;
  let serverStatus: SessionStatus | null = null;

  const repaint = (): void => {
    const model: ViewModel = {
      phase,
      catalog,
      catalogError,
      state,
      sessionId: transport?.sessionId ?? null,
      serverStatus,
    };
    render(root, model);
  };

  const finish = async (): Promise<void> => {
    phase = "done";
    transport?.close();
    serverStatus = (await transport?.status()) ?? null;
    repaint();
  };

  const hooks: TransportHooks = {
    onMessage(message: ServerMessage): void {
      state = reduce(state, message);
      if (state.completed && phase === "building") {
        void finish();
      }
      repaint();
    },
    onError(text: string): void {
      state = reduce(state, { type: "error", text });
      repaint();
    },
  };

  bindHandlers(root, {
    onStart(scenario, strategy, transportKind): void {
      if (phase !== "setup") {
        return;
      }
      transport =
        transportKind === "websocket"
          ? new SocketTransport(baseUrl, hooks)
          : new PollingTransport(baseUrl, hooks, {
              intervalMs: options.pollIntervalMs,
            });
      phase = "building";
      repaint();
      transport.start(scenario, strategy).catch((problem) => {
        hooks.onError(String(problem));
      });
    },
    onCell(x, y, z, filled): void {
      if (phase !== "building" || transport === null) {
        return;
      }
      void transport.send({ type: filled ? "remove" : "place", x, y, z });
    },
  });

  repaint();
  try {
    const response = await fetch(`${baseUrl}/api/scenarios`);
    if (!response.ok) {
      throw new Error(`HTTP ${response.status}`);
    }
    catalog = (await response.json()) as ScenarioCatalog;
  } catch (problem) {
    catalogError = `Cannot reach the session server: ${String(problem)}`;
  }
  repaint();

  return {
    get state(): AppState {
      return state;
    },
    get transport(): Transport | null {
      return transport;
    },
    dispose(): void {
      transport?.close();
    },
  };
}
