// In-memory stand-in for the /v1 service, wired into ApiClient through its
// fetchFn seam so unit tests exercise the real request paths.

import { ApiClient } from "../src/api";
import type {
  Advice,
  BatchStats,
  LabelSubmission,
  MetricsResponse,
  QueueItem,
  SessionView,
} from "../src/types";

export interface FakeDoc {
  doc_id: string;
  title: string;
  abstract: string;
  priority_score: number | null;
}

export class FakeBackend {
  labels: LabelSubmission[] = [];
  effective = new Map<string, LabelSubmission>();
  modelVersion = 0;
  jobPollsUntilDone = 1;
  offline = false;
  phase: SessionView["phase"] = "bootstrapping";
  exclusionCriteria: string[] = [];
  adviceStopTraining = false;
  adviceStopScreening = false;
  requests: { method: string; path: string; body: unknown }[] = [];
  private jobPolls = new Map<string, number>();
  private jobCounter = 0;

  constructor(public docs: FakeDoc[]) {}

  client(): ApiClient {
    return new ApiClient("http://fake", null, this.fetch);
  }

  private view(): SessionView {
    return {
      project_id: "p1",
      phase: this.phase,
      model_version: this.modelVersion,
      screened: this.effective.size,
      unscreened: this.docs.length - this.effective.size,
      identified: [...this.effective.values()].filter((l) => l.decision === "included")
        .length,
      corpus_size: this.docs.length,
      exclusion_criteria: this.exclusionCriteria,
      advice: this.advice(),
      job_running: false,
    };
  }

  private advice(): Advice {
    return {
      phase: this.phase,
      stop_training: {
        advised: this.adviceStopTraining,
        rank_similarity: this.adviceStopTraining ? 0.97 : 0.61,
        threshold: 0.95,
        patience: 1,
        training_size: this.effective.size,
        max_training_size: null,
      },
      stop_screening: {
        advised: this.adviceStopScreening,
        batch_included: this.adviceStopScreening ? 1 : 9,
        batch_inclusion_rate: this.adviceStopScreening ? 0.01 : 0.09,
        min_rate: 0.02,
      },
    };
  }

  metricsPayload(): MetricsResponse {
    const batches: BatchStats[] = [
      {
        index: 0,
        kind: "bootstrap",
        size: this.docs.length,
        labeled: this.effective.size,
        included: [...this.effective.values()].filter((l) => l.decision === "included")
          .length,
        inclusion_rate: this.effective.size
          ? [...this.effective.values()].filter((l) => l.decision === "included")
              .length / this.effective.size
          : null,
      },
    ];
    return {
      n: this.docs.length,
      screened: this.effective.size,
      human_effort: this.effective.size / this.docs.length,
      identified: [...this.effective.values()].filter((l) => l.decision === "included")
        .length,
      inclusion_rate: {
        identified_so_far: [...this.effective.values()].filter(
          (l) => l.decision === "included",
        ).length,
        denominator_known: false,
        note: "lower-bound denominator unknown",
      },
      batches,
      rank_similarity_history: this.modelVersion
        ? [{ iteration: 0, rank_similarity: null }]
        : [],
      f1_history: this.modelVersion ? [{ model_version: 1, val_f1: 0.8125 }] : [],
    };
  }

  private json(payload: unknown, status = 200): Response {
    return new Response(JSON.stringify(payload), {
      status,
      headers: { "content-type": "application/json" },
    });
  }

  fetch = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    if (this.offline) throw new TypeError("fetch failed");
    const url = new URL(String(input));
    const path = url.pathname;
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    this.requests.push({ method, path, body });

    if (path === "/v1/projects/p1" && method === "GET") return this.json(this.view());
    if (path === "/v1/projects/p1/batch") {
      const limit = Number(url.searchParams.get("limit") ?? 50);
      const items: QueueItem[] = this.docs
        .filter((d) => !this.effective.has(d.doc_id))
        .slice(0, limit)
        .map((d, i) => ({
          doc_id: d.doc_id,
          title: d.title,
          abstract: d.abstract,
          priority_score: this.phase === "bootstrapping" ? null : d.priority_score,
          position: i + 1,
        }));
      return this.json({ phase: this.phase, done: items.length === 0, items });
    }
    if (path === "/v1/projects/p1/labels" && method === "POST") {
      const records = body as LabelSubmission[];
      for (const record of records) {
        this.labels.push(record);
        this.effective.set(record.doc_id, record);
      }
      return this.json({
        accepted: records.length,
        errors: [],
        screened: this.effective.size,
        identified: [...this.effective.values()].filter(
          (l) => l.decision === "included",
        ).length,
      });
    }
    if (path === "/v1/projects/p1/retrain" && method === "POST") {
      const jobId = `j${++this.jobCounter}`;
      this.jobPolls.set(jobId, 0);
      return this.json({ job_id: jobId, status: "queued" }, 202);
    }
    const jobMatch = path.match(/^\/v1\/projects\/p1\/jobs\/(.+)$/);
    if (jobMatch) {
      const jobId = jobMatch[1];
      const polls = (this.jobPolls.get(jobId) ?? 0) + 1;
      this.jobPolls.set(jobId, polls);
      if (polls >= this.jobPollsUntilDone) {
        this.modelVersion += 1;
        this.phase = "active_learning";
        return this.json({
          job_id: jobId,
          status: "done",
          model_version: this.modelVersion,
          stopped: false,
          error: null,
        });
      }
      return this.json({
        job_id: jobId,
        status: "running",
        model_version: null,
        stopped: null,
        error: null,
      });
    }
    if (path === "/v1/projects/p1/metrics") return this.json(this.metricsPayload());
    if (path === "/v1/projects/p1/advice") return this.json(this.advice());
    return this.json({ code: "not_found", message: path, details: {} }, 404);
  };
}

export function fakeDocs(n: number): FakeDoc[] {
  return Array.from({ length: n }, (_, i) => ({
    doc_id: `d${String(i).padStart(3, "0")}`,
    title: `Study ${i} of irrigation outcomes`,
    abstract: `Abstract text for study ${i}.`,
    priority_score: 1 - i / n,
  }));
}

export class MemoryStorage {
  private map = new Map<string, string>();
  getItem(key: string): string | null {
    return this.map.get(key) ?? null;
  }
  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }
}

export function press(key: string, target: Document = document): void {
  target.dispatchEvent(new KeyboardEvent("keydown", { key, bubbles: true }));
}

export async function settle(): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, 0));
  await new Promise((resolve) => setTimeout(resolve, 0));
}
