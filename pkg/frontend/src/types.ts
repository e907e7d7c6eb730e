// Payload shapes of the /v1 screening service.

export type Phase =
  | "bootstrapping"
  | "active_learning"
  | "prioritized_screening"
  | "done";

export interface QueueItem {
  doc_id: string;
  title: string;
  abstract: string;
  priority_score: number | null;
  position: number;
}

export interface BatchResponse {
  phase: Phase;
  done: boolean;
  items: QueueItem[];
}

export interface SessionView {
  project_id: string;
  phase: Phase;
  model_version: number;
  screened: number;
  unscreened: number;
  identified: number;
  corpus_size: number;
  exclusion_criteria: string[];
  advice: Advice | null;
  job_running: boolean;
}

export interface Advice {
  phase: Phase;
  stop_training: {
    advised: boolean;
    rank_similarity: number | null;
    threshold: number | null;
    patience: number;
    training_size: number;
    max_training_size: number | null;
  };
  stop_screening: {
    advised: boolean;
    batch_included: number | null;
    batch_inclusion_rate: number | null;
    min_rate: number;
  };
}

export interface BatchStats {
  index: number;
  kind: "bootstrap" | "query" | "prioritized";
  size: number;
  labeled: number;
  included: number;
  inclusion_rate: number | null;
}

export interface MetricsResponse {
  n: number;
  screened: number;
  human_effort: number;
  identified: number;
  inclusion_rate: {
    identified_so_far: number;
    denominator_known: boolean;
    note: string;
  };
  batches: BatchStats[];
  rank_similarity_history: { iteration: number; rank_similarity: number | null }[];
  f1_history: { model_version: number; val_f1: number | null }[];
}

export interface LabelSubmission {
  doc_id: string;
  decision: "included" | "excluded";
  exclusion_criterion?: string | null;
  screener_id?: string;
  timestamp?: string;
}

export interface LabelResponse {
  accepted: number;
  errors: { index: number; doc_id: string | null; code: string; message: string }[];
  screened: number;
  identified: number;
  auto_retrain_job?: string;
}

export interface JobStatus {
  job_id: string;
  status: "queued" | "running" | "done" | "failed";
  model_version: number | null;
  stopped: boolean | null;
  error: string | null;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details: Record<string, unknown>;
}
