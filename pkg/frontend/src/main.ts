/** DOM shell: wires the API client, queue cursor, charts and hotkeys
 * into the page.  All state shown here is derived from server responses,
 * so a reload rebuilds the identical view.
 */

import { ApiClient, ApiError } from "./api.js";
import { histogramSvg, historyChartSvg } from "./charts.js";
import { bindHotkeys } from "./hotkeys.js";
import { formatPercent, formatUncertainty, opinionView } from "./opinion.js";
import { QueueCursor } from "./queue.js";
import { initialUiState, labelingEnabled, nextUiState, type UiState } from "./status.js";
import type { QueueItem, RoundRecord } from "./types.js";

const POLL_INTERVAL_MS = 700;

const api = new ApiClient("");

let ui: UiState = initialUiState;
let cursor: QueueCursor | null = null;
let cursorRound = -1;
let submitting = false;
let unbindHotkeys: (() => void) | null = null;
let xyBounds = { minX: -1, maxX: 1, minY: -1, maxY: 1 };

const el = (id: string): HTMLElement => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
};

function toast(message: string): void {
  const box = el("toasts");
  const node = document.createElement("div");
  node.className = "toast";
  node.textContent = message;
  box.appendChild(node);
  setTimeout(() => node.remove(), 3500);
}

function renderHeader(): void {
  const status = ui.status;
  el("conn-banner").hidden = ui.connection !== "lost";
  el("phase-badge").textContent = ui.phase;
  el("phase-badge").dataset.phase = ui.phase;
  if (!status) return;
  el("round-indicator").textContent = `round ${status.round}`;
  el("fraction-indicator").textContent = `${formatPercent(status.labels_fraction)} labeled`;
  el("quota-indicator").textContent =
    ui.phase === "awaiting_labels" ? `${status.quota_remaining} to label` : "";
  if (status.failure) toast(`run failed: ${status.failure}`);
}

function updateBounds(items: QueueItem[]): void {
  for (const item of items) {
    const [x, y] = item.display_xy;
    xyBounds = {
      minX: Math.min(xyBounds.minX, x),
      maxX: Math.max(xyBounds.maxX, x),
      minY: Math.min(xyBounds.minY, y),
      maxY: Math.max(xyBounds.maxY, y),
    };
  }
}

function renderCard(): void {
  const card = el("card");
  const item = cursor?.current() ?? null;
  const enabled = labelingEnabled(ui) && item !== null && !submitting;
  if (!item) {
    card.innerHTML =
      ui.phase === "training"
        ? '<p class="card-note">fine-tuning on the new labels…</p>'
        : ui.phase === "finished"
          ? '<p class="card-note">run complete — see the history panel</p>'
          : '<p class="card-note">waiting for the next queue…</p>';
    return;
  }
  const k = ui.status?.K ?? item.belief.length;
  const view = opinionView(item);
  const [x, y] = item.display_xy;
  const px = (100 * (x - xyBounds.minX)) / (xyBounds.maxX - xyBounds.minX || 1);
  const py = (100 * (y - xyBounds.minY)) / (xyBounds.maxY - xyBounds.minY || 1);
  const bars = view.beliefPercents
    .map(
      (pct, i) =>
        `<div class="belief-row"><span class="belief-name">class ${i}</span>` +
        `<div class="belief-track"><div class="belief-fill" style="width:${pct.toFixed(2)}%"></div></div>` +
        `<span class="belief-value">${(pct / 100).toFixed(3)}</span></div>`,
    )
    .join("");
  const buttons = Array.from({ length: k }, (_, i) => {
    return (
      `<button class="label-btn" data-class="${i}" ${enabled ? "" : "disabled"}>` +
      `<kbd>${i + 1}</kbd> class ${i}</button>`
    );
  }).join("");
  card.innerHTML = `
    <div class="card-head">
      <span>sample #${item.sample_id}</span>
      <span>queue: ${cursor!.remaining()} left</span>
    </div>
    <div class="scatter"><div class="dot" style="left:${px.toFixed(1)}%; bottom:${py.toFixed(1)}%"></div></div>
    <div class="gauge-row">
      <span class="belief-name">uncertainty</span>
      <div class="gauge-track"><div class="gauge-fill" style="width:${view.gaugePercent.toFixed(2)}%"></div></div>
      <span class="belief-value">${formatUncertainty(item.uncertainty)}</span>
    </div>
    ${view.consistent ? "" : '<p class="warn">opinion masses inconsistent</p>'}
    <div class="beliefs">${bars}</div>
    <div class="buttons">${buttons}</div>
  `;
  for (const btn of card.querySelectorAll<HTMLButtonElement>(".label-btn")) {
    btn.addEventListener("click", () => submit(Number(btn.dataset.class)));
  }
}

async function submit(classIndex: number): Promise<void> {
  const item = cursor?.current();
  if (!item || submitting || !labelingEnabled(ui)) return;
  submitting = true;
  try {
    const result = await api.submitLabel(item.sample_id, classIndex);
    cursor!.advance();
    if (ui.status) ui.status.quota_remaining = result.quota_remaining;
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      toast(`skipped #${item.sample_id}: ${err.detail}`);
      cursor!.skip(item.sample_id);
    } else if (err instanceof ApiError) {
      toast(err.detail);
    } else {
      toast("network error while submitting");
    }
  } finally {
    submitting = false;
    renderHeader();
    renderCard();
  }
}

async function refreshQueue(): Promise<void> {
  try {
    const items = await api.queue();
    updateBounds(items);
    cursor = new QueueCursor(items);
    cursorRound = items.length > 0 ? items[0].round : cursorRound;
  } catch (err) {
    if (!(err instanceof ApiError && err.status === 409)) {
      toast("failed to load queue");
    }
    cursor = new QueueCursor([]);
  }
  renderCard();
}

async function refreshHistory(): Promise<void> {
  let records: RoundRecord[] = [];
  try {
    records = await api.history();
  } catch {
    /* keep placeholder */
  }
  el("history-chart").innerHTML = historyChartSvg(records);
  if (records.length > 0) {
    try {
      el("histogram-panel").innerHTML = histogramSvg(await api.histograms());
    } catch {
      /* no completed round yet */
    }
  }
}

function rebindHotkeys(): void {
  unbindHotkeys?.();
  const k = ui.status?.K ?? 0;
  unbindHotkeys = bindHotkeys(k, (classIndex) => void submit(classIndex), window);
}

async function poll(): Promise<void> {
  let result: Parameters<typeof nextUiState>[1];
  try {
    result = { ok: true, status: await api.status() };
  } catch {
    result = { ok: false };
  }
  const prev = ui;
  ui = nextUiState(prev, result);
  renderHeader();
  const roundChanged = ui.status !== null && ui.status.round + 1 !== cursorRound;
  if (ui.phase === "awaiting_labels" && (cursor === null || roundChanged)) {
    await refreshQueue();
    await refreshHistory();
  } else if (ui.phase !== prev.phase) {
    renderCard();
    await refreshHistory();
  }
  if (prev.status?.K !== ui.status?.K) rebindHotkeys();
}

function start(): void {
  rebindHotkeys();
  void refreshHistory();
  void poll();
  setInterval(() => void poll(), POLL_INTERVAL_MS);
}

start();
