// Typed client for the annotation HTTP API.

import type { Task } from "./schema.js";

export interface NextTileResponse {
  tile_id: string | null;
  image_url: string | null;
  task: Task;
  classes: string[];
  done: boolean;
  pending: number;
  lease_seconds: number;
}

export interface Progress {
  task: Task;
  labeled: number;
  total: number;
  per_class: Record<string, number>;
}

export interface LabelPayload {
  tile_id: string;
  task: Task;
  label: string;
  annotator: string;
}

export type SubmitResult =
  | { status: "ok"; labeled: number; total: number }
  | { status: "conflict" }   // 409: lease lost
  | { status: "rejected" }   // 4xx other than conflict (schema violation etc.)
  | { status: "offline" };   // network failure: retry later

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  url(path: string): string {
    return this.baseUrl + path;
  }

  async nextTile(task: Task, annotator: string): Promise<NextTileResponse> {
    const params = new URLSearchParams({ task, annotator });
    const response = await this.fetchFn(this.url(`/api/next?${params}`));
    if (!response.ok) {
      throw new Error(`next-tile failed: HTTP ${response.status}`);
    }
    return (await response.json()) as NextTileResponse;
  }

  async submitLabel(payload: LabelPayload): Promise<SubmitResult> {
    let response: Response;
    try {
      response = await this.fetchFn(this.url("/api/label"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(payload),
      });
    } catch {
      return { status: "offline" };
    }
    if (response.ok) {
      const body = (await response.json()) as { labeled: number; total: number };
      return { status: "ok", labeled: body.labeled, total: body.total };
    }
    if (response.status === 409) {
      return { status: "conflict" };
    }
    return { status: "rejected" };
  }

  async release(tileId: string, annotator: string): Promise<void> {
    try {
      await this.fetchFn(this.url("/api/release"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ tile_id: tileId, annotator }),
      });
    } catch {
      // releasing is best-effort; the server lease expires on its own
    }
  }

  async progress(task: Task): Promise<Progress> {
    const response = await this.fetchFn(this.url(`/api/progress?task=${task}`));
    if (!response.ok) {
      throw new Error(`progress failed: HTTP ${response.status}`);
    }
    return (await response.json()) as Progress;
  }
}
