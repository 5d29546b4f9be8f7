/** Session state: cursor, pending label queue, sync status.
 *
 * Queue invariants: records post strictly in enqueue order; a record is
 * reported "saved" only after the service answered 201.  A failed post
 * flips the session offline and keeps the record (and everything behind
 * it) queued; retry() resumes from the head.
 */

import type { ApiClient } from "./api.js";
import type { PostLabelBody } from "./types.js";

export type SyncStatus = "idle" | "syncing" | "offline";
export type RecordState = "pending" | "saved";

export function labelKey(body: PostLabelBody): string {
  return body.kind === "pragmatic"
    ? `prag:${body.node}:${body.annotator}`
    : `link:${body.review}|${body.paper}:${body.annotator}`;
}

interface QueueItem {
  key: string;
  body: PostLabelBody;
}

export class SessionState {
  cursor = 0;
  status: SyncStatus = "idle";
  private queue: QueueItem[] = [];
  private states = new Map<string, RecordState>();
  private draining = false;
  private listeners: (() => void)[] = [];

  constructor(
    private readonly api: ApiClient,
    readonly projectId: string,
    readonly annotator: string,
  ) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  recordState(key: string): RecordState | undefined {
    return this.states.get(key);
  }

  /** Mark records already stored on the service (render after reload). */
  markSaved(key: string): void {
    this.states.set(key, "saved");
  }

  pendingCount(): number {
    return this.queue.length;
  }

  enqueue(body: PostLabelBody): Promise<void> {
    const key = labelKey(body);
    this.states.set(key, "pending");
    this.queue.push({ key, body });
    this.notify();
    return this.drain();
  }

  retry(): Promise<void> {
    if (this.status === "offline") this.status = "idle";
    return this.drain();
  }

  private async drain(): Promise<void> {
    if (this.draining || this.status === "offline") return;
    this.draining = true;
    this.status = "syncing";
    this.notify();
    try {
      while (this.queue.length > 0) {
        const head = this.queue[0];
        try {
          await this.api.postLabel(this.projectId, head.body);
        } catch (err) {
          this.status = "offline";
          this.notify();
          return;
        }
        this.queue.shift();
        this.states.set(head.key, "saved");
        this.notify();
      }
      this.status = "idle";
      this.notify();
    } finally {
      this.draining = false;
    }
  }
}
