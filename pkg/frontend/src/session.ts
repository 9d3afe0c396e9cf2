// Labeling session state machine: one annotator, one task, at most one
// lease at a time. Framework-free so it can be driven headlessly in tests.

import { ApiClient, LabelPayload, Progress } from "./api.js";
import { SKIP_KEY, Task, labelForKey } from "./schema.js";

export interface Lease {
  tileId: string;
  imageUrl: string;
  classes: string[];
  expiresAt: number; // client-side clock, ms
}

export type SessionState =
  | { kind: "idle" }
  | { kind: "labeling"; lease: Lease }
  | { kind: "waiting"; pending: number } // everything left is leased elsewhere
  | { kind: "done" };

export type Listener = () => void;

export class UiSession {
  state: SessionState = { kind: "idle" };
  progress: Progress | null = null;
  banner: string | null = null;
  retryQueue: LabelPayload[] = [];

  private listeners: Listener[] = [];
  private busy = false;

  constructor(
    private readonly api: ApiClient,
    readonly task: Task,
    readonly annotator: string,
    private readonly clock: () => number = () => Date.now(),
  ) {}

  onChange(listener: Listener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  get lease(): Lease | null {
    return this.state.kind === "labeling" ? this.state.lease : null;
  }

  /** True when the client-side lease clock ran out. */
  leaseExpired(): boolean {
    const lease = this.lease;
    return lease !== null && this.clock() >= lease.expiresAt;
  }

  /** Fetch the next tile. Never stacks a second lease on an active one. */
  async nextTile(): Promise<void> {
    if (this.lease !== null && !this.leaseExpired()) {
      return; // invariant: a session holds at most one lease
    }
    let response;
    try {
      response = await this.api.nextTile(this.task, this.annotator);
    } catch {
      this.banner = this.banner ?? "Cannot reach the service; will retry";
      this.state = { kind: "idle" };
      this.notify();
      return;
    }
    if (response.tile_id === null) {
      // set the terminal state first: refreshProgress refetches while idle
      this.state = response.done ? { kind: "done" } : { kind: "waiting", pending: response.pending };
      await this.refreshProgress();
    } else {
      this.state = {
        kind: "labeling",
        lease: {
          tileId: response.tile_id,
          imageUrl: response.image_url ?? "",
          classes: response.classes,
          expiresAt: this.clock() + response.lease_seconds * 1000,
        },
      };
    }
    this.notify();
  }

  /** Keyboard entry point: "1".."K" label, "0" skip; anything else ignored. */
  async handleKey(key: string): Promise<void> {
    if (this.busy || this.state.kind !== "labeling") {
      return;
    }
    if (key === SKIP_KEY) {
      await this.skip();
      return;
    }
    const label = labelForKey(this.state.lease.classes, key);
    if (label === null) {
      return; // invalid key: no request leaves the client
    }
    await this.submitLabel(label);
  }

  /** Release the current lease and advance. */
  async skip(): Promise<void> {
    const lease = this.lease;
    if (lease === null) {
      return;
    }
    this.busy = true;
    try {
      this.state = { kind: "idle" };
      await this.api.release(lease.tileId, this.annotator);
      await this.nextTile();
    } finally {
      this.busy = false;
    }
  }

  /** Submit a label for the current lease, optimistically advancing. */
  async submitLabel(label: string): Promise<void> {
    const lease = this.lease;
    if (lease === null) {
      return;
    }
    if (this.leaseExpired()) {
      this.banner = "Lease expired; fetching a fresh tile";
      this.state = { kind: "idle" };
      await this.nextTile();
      return;
    }
    this.busy = true;
    try {
      const payload: LabelPayload = {
        tile_id: lease.tileId,
        task: this.task,
        label,
        annotator: this.annotator,
      };
      this.state = { kind: "idle" }; // optimistic advance
      const result = await this.api.submitLabel(payload);
      if (result.status === "ok") {
        this.banner = null;
        if (this.progress) {
          this.progress = { ...this.progress, labeled: result.labeled, total: result.total };
        }
        await this.drainRetryQueue();
      } else if (result.status === "offline") {
        this.retryQueue.push(payload);
        this.banner = `Offline: ${this.retryQueue.length} label(s) queued for retry`;
      } else if (result.status === "conflict") {
        this.banner = "Lease was lost to a timeout; tile will be served again";
      } else {
        this.banner = `Label rejected for ${lease.tileId}`;
      }
      await this.nextTile();
    } finally {
      this.busy = false;
      this.notify();
    }
  }

  /** Re-send queued labels after connectivity returns; keeps order. */
  async drainRetryQueue(): Promise<number> {
    let sent = 0;
    while (this.retryQueue.length > 0) {
      const payload = this.retryQueue[0];
      const result = await this.api.submitLabel(payload);
      if (result.status === "offline") {
        break; // still unreachable, keep the queue
      }
      this.retryQueue.shift();
      if (result.status === "ok") {
        sent += 1;
      }
    }
    if (sent > 0 && this.retryQueue.length === 0) {
      this.banner = null;
    }
    this.notify();
    return sent;
  }

  /** Client-side lease timeout: drop the stale lease and refetch. */
  async checkLease(): Promise<void> {
    if (this.leaseExpired()) {
      this.banner = "Lease expired; fetching a fresh tile";
      this.state = { kind: "idle" };
      this.notify();
      await this.nextTile();
    }
  }

  async refreshProgress(): Promise<void> {
    try {
      this.progress = await this.api.progress(this.task);
      if (this.retryQueue.length > 0) {
        await this.drainRetryQueue(); // connectivity is back
      }
      if (this.state.kind === "idle") {
        await this.nextTile(); // recover after an outage
      }
    } catch {
      // poll failures are transient; keep the last snapshot
    }
    this.notify();
  }
}
