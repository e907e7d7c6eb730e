// FIFO queue for label submissions that failed to reach the service.
// Persisted in localStorage so a reload keeps unsent decisions; flushed as a
// single ordered batch so the server applies them in submission order.

import { ApiClient, OfflineError } from "./api";
import type { LabelSubmission } from "./types";

const STORAGE_KEY = "evidscreen.offlineQueue";

export class OfflineQueue {
  private items: LabelSubmission[] = [];

  constructor(
    private storage: Pick<Storage, "getItem" | "setItem"> = window.localStorage,
    private key: string = STORAGE_KEY,
  ) {
    const raw = this.storage.getItem(this.key);
    if (raw) {
      try {
        this.items = JSON.parse(raw) as LabelSubmission[];
      } catch {
        this.items = [];
      }
    }
  }

  get length(): number {
    return this.items.length;
  }

  pending(): LabelSubmission[] {
    return [...this.items];
  }

  push(record: LabelSubmission): void {
    this.items.push(record);
    this.save();
  }

  /** Send everything in order; on failure the unsent tail stays queued. */
  async flush(api: ApiClient, projectId: string): Promise<number> {
    if (!this.items.length) return 0;
    const batch = [...this.items];
    try {
      const response = await api.submitLabels(projectId, batch);
      this.items = this.items.slice(batch.length);
      this.save();
      return response.accepted;
    } catch (error) {
      if (error instanceof OfflineError) return 0; // still down, keep queue
      throw error;
    }
  }

  private save(): void {
    this.storage.setItem(this.key, JSON.stringify(this.items));
  }
}
