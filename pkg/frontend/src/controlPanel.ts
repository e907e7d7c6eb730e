// Retrain/phase controls. The retrain button only arms when the service
// reports the issued batch fully labeled and no job in flight; when the
// stop-training advice is up, triggering the retrain that may finalize
// prioritization asks for explicit confirmation first.

import { ApiClient, ApiError } from "./api";
import type { SessionSnapshot } from "./session";
import type { JobStatus } from "./types";

export interface ControlCallbacks {
  onJobDone?(job: JobStatus): void;
  confirm?(message: string): boolean;
}

export class ControlPanel {
  activeJob: string | null = null;
  lastJob: JobStatus | null = null;
  private snapshot: SessionSnapshot | null = null;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private projectId: string,
    private callbacks: ControlCallbacks = {},
    private pollMs = 500,
  ) {}

  update(snapshot: SessionSnapshot): void {
    this.snapshot = snapshot;
    this.render();
  }

  private retrainBlockers(): string | null {
    const view = this.snapshot?.view;
    const metrics = this.snapshot?.metrics;
    if (!view || !metrics) return "waiting for service";
    if (this.activeJob || view.job_running) return "training job running";
    if (view.phase === "bootstrapping" || view.phase === "active_learning") {
      const open = metrics.batches.find((b) => b.labeled < b.size);
      if (open) return `${open.size - open.labeled} label(s) remaining in batch`;
      return null;
    }
    return `not available in ${view.phase}`;
  }

  async triggerRetrain(): Promise<void> {
    const blocked = this.retrainBlockers();
    if (blocked) return;
    const advice = this.snapshot?.advice;
    if (advice?.stop_training.advised) {
      const ok = (this.callbacks.confirm ?? window.confirm)(
        "Rankings have settled; this retrain will likely finalize the " +
          "prioritized queue. Advance toward prioritized screening?",
      );
      if (!ok) return;
    }
    try {
      const { job_id } = await this.api.retrain(this.projectId);
      this.activeJob = job_id;
      this.render();
      void this.poll(job_id);
    } catch (error) {
      if (error instanceof ApiError) {
        this.lastJob = {
          job_id: "n/a",
          status: "failed",
          model_version: null,
          stopped: null,
          error: error.body.message,
        };
        this.render();
        return;
      }
      throw error;
    }
  }

  private async poll(jobId: string): Promise<void> {
    for (;;) {
      const job = await this.api.job(this.projectId, jobId);
      this.lastJob = job;
      if (job.status === "done" || job.status === "failed") {
        this.activeJob = null;
        this.render();
        this.callbacks.onJobDone?.(job);
        return;
      }
      this.render();
      await new Promise((resolve) => setTimeout(resolve, this.pollMs));
    }
  }

  render(): void {
    const view = this.snapshot?.view;
    const blocked = this.retrainBlockers();
    const spinner = this.activeJob
      ? `<span class="spinner" data-testid="job-spinner">job ${this.activeJob}
           ${this.lastJob?.status ?? "queued"}…</span>`
      : "";
    const last = this.lastJob && !this.activeJob
      ? `<span data-testid="job-result">last job ${this.lastJob.status}${
          this.lastJob.error ? `: ${this.lastJob.error}` : ""
        }</span>`
      : "";
    this.root.innerHTML = `
      <div class="panel controls">
        <button data-testid="retrain" ${blocked ? "disabled" : ""}>retrain model</button>
        ${blocked ? `<span class="why" data-testid="retrain-blocked">${blocked}</span>` : ""}
        ${spinner} ${last}
        <span class="badge" data-testid="version-badge">model v${view?.model_version ?? 0}</span>
      </div>`;
    this.root
      .querySelector('[data-testid="retrain"]')
      ?.addEventListener("click", () => void this.triggerRetrain());
  }
}
