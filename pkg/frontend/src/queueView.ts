// Labeling queue: a ranked list, a detail pane for the current document, and
// immediate label posting. Include/exclude leave the queue instantly; undo
// re-opens the last decided document so the next decision posts a
// superseding record. When the service is unreachable, decisions queue
// locally and flush on reconnect in their original order.

import { ApiClient, OfflineError } from "./api";
import { OfflineQueue } from "./offlineQueue";
import type { LabelSubmission, Phase, QueueItem } from "./types";

export interface QueueCallbacks {
  onLabeled?(record: LabelSubmission, offline: boolean): void;
  onQueueEmpty?(): void;
}

interface Decided {
  item: QueueItem;
  record: LabelSubmission;
}

const esc = (text: string): string =>
  text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export class QueueView {
  items: QueueItem[] = [];
  phase: Phase = "bootstrapping";
  redeciding = false;
  pickerCriteria: string[] | null = null;
  private history: Decided[] = [];
  private screener: string;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private projectId: string,
    private offlineQueue: OfflineQueue,
    private exclusionCriteria: string[],
    private callbacks: QueueCallbacks = {},
    screener = "reviewer",
  ) {
    this.screener = screener;
  }

  async load(limit = 50): Promise<void> {
    const batch = await this.api.batch(this.projectId, limit);
    this.phase = batch.phase;
    this.items = batch.items;
    this.redeciding = false;
    this.render();
    if (!batch.items.length && this.callbacks.onQueueEmpty) {
      this.callbacks.onQueueEmpty();
    }
  }

  current(): QueueItem | null {
    return this.items[0] ?? null;
  }

  include(): void {
    void this.decide("included", null);
  }

  exclude(): void {
    if (this.exclusionCriteria.length) {
      this.pickerCriteria = this.exclusionCriteria;
      this.render();
      return;
    }
    void this.decide("excluded", null);
  }

  pickCriterion(index: number): void {
    if (!this.pickerCriteria || index >= this.pickerCriteria.length) return;
    const criterion = this.pickerCriteria[index];
    this.pickerCriteria = null;
    void this.decide("excluded", criterion);
  }

  cancelPicker(): void {
    this.pickerCriteria = null;
    this.render();
  }

  /** Re-open the last decided document; the next decision supersedes it. */
  undo(): void {
    const last = this.history.pop();
    if (!last) return;
    this.pickerCriteria = null;
    this.items.unshift(last.item);
    this.redeciding = true;
    this.render();
  }

  private async decide(
    decision: "included" | "excluded",
    criterion: string | null,
  ): Promise<void> {
    const item = this.current();
    if (!item) return;
    const record: LabelSubmission = {
      doc_id: item.doc_id,
      decision,
      exclusion_criterion: criterion,
      screener_id: this.screener,
      timestamp: new Date().toISOString(),
    };
    this.items.shift();
    this.history.push({ item, record });
    this.redeciding = false;
    let offline = false;
    try {
      // anything stuck from earlier goes first so order is preserved
      await this.offlineQueue.flush(this.api, this.projectId);
      if (this.offlineQueue.length) throw new OfflineError("queue not drained");
      await this.api.submitLabels(this.projectId, [record]);
    } catch (error) {
      if (!(error instanceof OfflineError)) throw error;
      this.offlineQueue.push(record);
      offline = true;
    }
    this.render();
    this.callbacks.onLabeled?.(record, offline);
    if (!this.items.length) this.callbacks.onQueueEmpty?.();
  }

  async reconnect(): Promise<number> {
    const flushed = await this.offlineQueue.flush(this.api, this.projectId);
    this.render();
    return flushed;
  }

  render(): void {
    const item = this.current();
    const offlineBanner = this.offlineQueue.length
      ? `<div class="banner offline" data-testid="offline-banner">service unreachable:
           ${this.offlineQueue.length} decision(s) queued locally</div>`
      : "";
    const picker = this.pickerCriteria
      ? `<div class="picker" data-testid="criterion-picker">
           <p>Exclusion criterion (press number, Esc to cancel):</p>
           <ol>${this.pickerCriteria.map((c) => `<li>${esc(c)}</li>`).join("")}</ol>
         </div>`
      : "";
    const detail = item
      ? `<div class="detail" data-testid="detail">
           ${this.redeciding ? '<span class="badge" data-testid="redecide-badge">re-deciding: next choice supersedes</span>' : ""}
           <h2 data-testid="detail-title">${esc(item.title)}</h2>
           <p class="score">${item.priority_score === null ? "no score yet (bootstrap sample)" : `priority ${item.priority_score.toFixed(4)}`}</p>
           <p data-testid="detail-abstract">${esc(item.abstract)}</p>
           <p class="hint">I = include, E = exclude, U = undo last</p>
         </div>`
      : `<div class="detail empty" data-testid="detail">queue drained: fetch the next batch or retrain</div>`;
    const rows = this.items
      .map(
        (q, i) => `<li class="${i === 0 ? "current" : ""}" data-doc="${esc(q.doc_id)}">
          <span class="pos">${i + 1}</span>
          <span class="title">${esc(q.title)}</span>
          <span class="ps">${q.priority_score === null ? "" : q.priority_score.toFixed(3)}</span>
        </li>`,
      )
      .join("");
    this.root.innerHTML = `
      ${offlineBanner}
      ${picker}
      <div class="queue-split">
        <ol class="queue-list" data-testid="queue-list">${rows}</ol>
        ${detail}
      </div>`;
  }
}
