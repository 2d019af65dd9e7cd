/** Connection-aware phase tracking for the poll loop. */

import type { Phase, StatusInfo } from "./types.js";

export type Connection = "ok" | "lost";

export interface UiState {
  phase: Phase | "unknown";
  connection: Connection;
  status: StatusInfo | null;
}

export const initialUiState: UiState = {
  phase: "unknown",
  connection: "ok",
  status: null,
};

export type PollResult = { ok: true; status: StatusInfo } | { ok: false };

/** Successful polls adopt the server phase; failures keep the last known
 * phase but flip the connection banner on. */
export function nextUiState(prev: UiState, result: PollResult): UiState {
  if (!result.ok) {
    return { ...prev, connection: "lost" };
  }
  return { phase: result.status.phase, connection: "ok", status: result.status };
}

export function labelingEnabled(state: UiState): boolean {
  return state.connection === "ok" && state.phase === "awaiting_labels";
}
