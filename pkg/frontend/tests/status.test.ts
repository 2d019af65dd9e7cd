import { describe, expect, it } from "vitest";

import { initialUiState, labelingEnabled, nextUiState } from "../src/status.js";
import type { StatusInfo } from "../src/types.js";

function status(phase: StatusInfo["phase"]): StatusInfo {
  return {
    round: 1,
    labels_fraction: 0.01,
    quota_remaining: 4,
    K: 3,
    phase,
    failure: null,
    last_round_metrics: null,
  };
}

describe("nextUiState", () => {
  it("adopts the server phase on successful polls", () => {
    const next = nextUiState(initialUiState, { ok: true, status: status("training") });
    expect(next.phase).toBe("training");
    expect(next.connection).toBe("ok");
  });

  it("keeps the last phase but flags the connection on failure", () => {
    const awaiting = nextUiState(initialUiState, { ok: true, status: status("awaiting_labels") });
    const lost = nextUiState(awaiting, { ok: false });
    expect(lost.phase).toBe("awaiting_labels");
    expect(lost.connection).toBe("lost");
    const recovered = nextUiState(lost, { ok: true, status: status("awaiting_labels") });
    expect(recovered.connection).toBe("ok");
  });
});

describe("labelingEnabled", () => {
  it("only allows labeling while awaiting labels with a live connection", () => {
    const awaiting = nextUiState(initialUiState, { ok: true, status: status("awaiting_labels") });
    expect(labelingEnabled(awaiting)).toBe(true);
    expect(labelingEnabled(nextUiState(awaiting, { ok: false }))).toBe(false);
    expect(labelingEnabled(nextUiState(awaiting, { ok: true, status: status("training") }))).toBe(false);
    expect(labelingEnabled(nextUiState(awaiting, { ok: true, status: status("finished") }))).toBe(false);
  });
});
