/** Wire types mirroring the annotation-service JSON bodies. */

export type Phase = "awaiting_labels" | "training" | "finished" | "failed";

export interface QueueItem {
  sample_id: number;
  features: number[];
  display_xy: [number, number];
  belief: number[];
  uncertainty: number;
  round: number;
}

export interface RoundRecord {
  round: number;
  labels_fraction: number;
  strategy: string;
  seed: number;
  accuracy: number;
  weighted_f1: number;
  mean_u_correct: number | null;
  mean_u_incorrect: number | null;
}

export interface StatusInfo {
  round: number;
  labels_fraction: number;
  quota_remaining: number;
  K: number;
  phase: Phase;
  failure: string | null;
  last_round_metrics: RoundRecord | null;
}

export interface HistogramPair {
  round: number;
  bin_edges: number[];
  counts_correct: number[];
  counts_incorrect: number[];
}

export interface SubmitResult {
  accepted: boolean;
  quota_remaining: number;
}
