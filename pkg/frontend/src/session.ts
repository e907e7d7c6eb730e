// Session store: polls the service and fans readouts to the views. The UI
// never fabricates numbers; everything shown comes from these payloads.

import { ApiClient, OfflineError } from "./api";
import type { Advice, MetricsResponse, SessionView } from "./types";

export interface SessionSnapshot {
  view: SessionView | null;
  metrics: MetricsResponse | null;
  advice: Advice | null;
  offline: boolean;
}

type Listener = (snapshot: SessionSnapshot) => void;

export class SessionStore {
  private snapshot: SessionSnapshot = {
    view: null,
    metrics: null,
    advice: null,
    offline: false,
  };
  private listeners: Listener[] = [];
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private api: ApiClient,
    private projectId: string,
    private intervalMs = 5000,
  ) {}

  current(): SessionSnapshot {
    return this.snapshot;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  async refresh(): Promise<SessionSnapshot> {
    try {
      const [view, metrics, advice] = await Promise.all([
        this.api.project(this.projectId),
        this.api.metrics(this.projectId),
        this.api.advice(this.projectId),
      ]);
      this.snapshot = { view, metrics, advice, offline: false };
    } catch (error) {
      if (!(error instanceof OfflineError)) throw error;
      this.snapshot = { ...this.snapshot, offline: true };
    }
    for (const listener of this.listeners) listener(this.snapshot);
    return this.snapshot;
  }

  start(): void {
    if (this.timer) return;
    void this.refresh();
    this.timer = setInterval(() => void this.refresh(), this.intervalMs);
  }

  stop(): void {
    if (this.timer) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
