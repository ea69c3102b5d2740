/** DOM rendering. The whole app re-renders from a view model on every
 * change; interaction arrives through event delegation on the root, so
 * re-rendering never loses listeners.
 */

import type { ScenarioCatalog, SessionStatus } from "./protocol.js";
import { cellKey, gridBounds, type AppState } from "./state.js";

export type Phase = "setup" | "building" | "done";

export interface ViewModel {
  phase: Phase;
  catalog: ScenarioCatalog | null;
  catalogError: string | null;
  state: AppState;
  sessionId: string | null;
  serverStatus: SessionStatus | null;
}

export interface Handlers {
  onStart(scenario: string, strategy: string, transport: string): void;
  onCell(x: number, y: number, z: number, filled: boolean): void;
}

const MARKER_PALETTE: Record<string, string> = {
  blue: "#2563eb",
  yellow: "#eab308",
  red: "#dc2626",
  black: "#1f2937",
};

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

function setupScreen(model: ViewModel): string {
  if (model.catalogError !== null) {
    return `<p class="error" data-testid="catalog-error">${escapeHtml(model.catalogError)}</p>`;
  }
  if (model.catalog === null) {
    return `<p data-testid="loading">Loading scenarios&hellip;</p>`;
  }
  const scenarios = model.catalog.scenarios
    .map((name) => `<option value="${escapeHtml(name)}">${escapeHtml(name)}</option>`)
    .join("");
  const strategies = model.catalog.strategies
    .map((name) => `<option value="${escapeHtml(name)}">${escapeHtml(name)}</option>`)
    .join("");
  return `
    <form class="setup" data-testid="setup">
      <label>Structure
        <select data-testid="scenario-select">${scenarios}</select>
      </label>
      <label>Instruction style
        <select data-testid="strategy-select">${strategies}</select>
      </label>
      <label>Transport
        <select data-testid="transport-select">
          <option value="polling">polling</option>
          <option value="websocket">websocket</option>
        </select>
      </label>
      <button type="button" data-action="start" data-testid="start-button">Start building</button>
    </form>`;
}

function bannerClass(model: ViewModel): string {
  if (model.state.transportError !== null) {
    return "banner error";
  }
  const kind = model.state.feedback?.kind;
  return kind ? `banner ${kind}` : "banner idle";
}

function bannerText(model: ViewModel): string {
  if (model.state.transportError !== null) {
    return model.state.transportError;
  }
  return model.state.feedback?.text ?? "Place the blocks the instruction asks for.";
}

function gridHtml(state: AppState): string {
  const bounds = gridBounds(state.blocks);
  const layers: string[] = [];
  for (let y = bounds.maxY; y >= bounds.minY; y -= 1) {
    const rows: string[] = [];
    for (let z = bounds.minZ; z <= bounds.maxZ; z += 1) {
      const cells: string[] = [];
      for (let x = bounds.minX; x <= bounds.maxX; x += 1) {
        const color = state.blocks.get(cellKey(x, y, z));
        const filled = color !== undefined;
        const paint =
          filled && color !== "none" ? MARKER_PALETTE[color] ?? "#6b7280" : "";
        const style = paint ? ` style="background:${paint}"` : "";
        cells.push(
          `<button type="button" class="cell ${filled ? "filled" : "empty"}"` +
            ` data-action="cell" data-x="${x}" data-y="${y}" data-z="${z}"` +
            ` data-filled="${filled}"${style}` +
            ` data-testid="cell-${x}-${y}-${z}"` +
            ` title="(${x}, ${y}, ${z})"></button>`,
        );
      }
      rows.push(`<div class="grid-row">${cells.join("")}</div>`);
    }
    layers.push(
      `<section class="layer" data-testid="layer-${y}">
        <h3>height ${y}</h3>
        <div class="grid">${rows.join("")}</div>
      </section>`,
    );
  }
  return layers.join("");
}

function metricsHtml(model: ViewModel): string {
  const local = model.state;
  const server = model.serverStatus;
  const rows: string[] = [
    `<dt>Outcome</dt><dd data-testid="outcome">${local.succeeded ? "structure complete" : "time ran out"}</dd>`,
    `<dt>Mistakes</dt><dd>${local.mistakes}</dd>`,
    `<dt>Blocks placed</dt><dd data-testid="placements">${local.placements}</dd>`,
  ];
  if (server !== null) {
    rows.push(`<dt>Duration (steps)</dt><dd>${server.metrics.durationSteps}</dd>`);
    const perObject = Object.entries(server.metrics.perObjectSteps)
      .map(([label, steps]) => `${escapeHtml(label)}: ${steps}`)
      .join(", ");
    if (perObject) {
      rows.push(`<dt>Per part</dt><dd data-testid="per-object">${perObject}</dd>`);
    }
  }
  return `<dl class="metrics" data-testid="metrics">${rows.join("")}</dl>`;
}

function buildScreen(model: ViewModel): string {
  const done = model.phase === "done";
  return `
    <div class="statusbar">
      <span class="counter" data-testid="mistakes">Mistakes: ${model.state.mistakes}</span>
      ${model.sessionId !== null ? `<span class="session" data-testid="session-id">${escapeHtml(model.sessionId)}</span>` : ""}
    </div>
    <p class="instruction" data-testid="instruction">${escapeHtml(model.state.instruction ?? "")}</p>
    <p class="${bannerClass(model)}" data-testid="banner" data-kind="${model.state.feedback?.kind ?? ""}">${escapeHtml(bannerText(model))}</p>
    ${done ? metricsHtml(model) : ""}
    <div class="layers" data-testid="grid">${gridHtml(model.state)}</div>`;
}

export function render(root: HTMLElement, model: ViewModel): void {
  const body = model.phase === "setup" ? setupScreen(model) : buildScreen(model);
  root.innerHTML = `
    <main class="app" data-phase="${model.phase}">
      <h1>block-by-block builder</h1>
      ${body}
    </main>`;
}

/** One delegated listener per root; survives every re-render. */
export function bindHandlers(root: HTMLElement, handlers: Handlers): void {
  root.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
    if (!target) {
      return;
    }
    if (target.dataset.action === "start") {
      const pick = (testid: string): string =>
        root.querySelector<HTMLSelectElement>(`[data-testid="${testid}"]`)?.value ?? "";
      handlers.onStart(
        pick("scenario-select"),
        pick("strategy-select"),
        pick("transport-select"),
      );
    } else if (target.dataset.action === "cell") {
      handlers.onCell(
        Number(target.dataset.x),
        Number(target.dataset.y),
        Number(target.dataset.z),
        target.dataset.filled === "true",
      );
    }
  });
}
