// Session state machine against a scripted in-memory server.

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { TASK_CLASSES } from "../src/schema.js";
import { UiSession } from "../src/session.js";

interface FakeServer {
  tiles: string[];
  labels: Map<string, string>;
  leases: Map<string, string>;
  cursors: Map<string, number>; // mirrors the real per-annotator queue cursor
  offline: boolean;
  conflictOnce: Set<string>;
  requests: { url: string; status: number }[];
}

function makeServer(tileCount: number): FakeServer {
  return {
    tiles: Array.from({ length: tileCount }, (_, i) => `t${String(i).padStart(3, "0")}`),
    labels: new Map(),
    leases: new Map(),
    cursors: new Map(),
    offline: false,
    conflictOnce: new Set(),
    requests: [],
  };
}

function fakeFetch(server: FakeServer) {
  return async (url: string, init?: RequestInit): Promise<Response> => {
    if (server.offline) {
      throw new TypeError("network down");
    }
    const respond = (status: number, body: unknown): Response => {
      server.requests.push({ url, status });
      return new Response(JSON.stringify(body), { status });
    };
    if (url.includes("/api/next")) {
      const annotator = new URL(url, "http://x").searchParams.get("annotator") ?? "";
      const start = server.cursors.get(annotator) ?? 0;
      const order = [...server.tiles.slice(start), ...server.tiles.slice(0, start)];
      const free = order.find((t) => !server.labels.has(t) && !server.leases.has(t));
      if (!free) {
        return respond(200, {
          tile_id: null, image_url: null, task: "roof_material",
          classes: [...TASK_CLASSES.roof_material], done: server.leases.size === 0,
          pending: server.leases.size, lease_seconds: 30,
        });
      }
      server.leases.set(free, annotator);
      server.cursors.set(annotator, server.tiles.indexOf(free) + 1);
      return respond(200, {
        tile_id: free, image_url: `/api/tile/${free}.png`, task: "roof_material",
        classes: [...TASK_CLASSES.roof_material], done: false, pending: 0, lease_seconds: 30,
      });
    }
    if (url.includes("/api/label")) {
      const payload = JSON.parse(String(init?.body));
      if (server.conflictOnce.delete(payload.tile_id)) {
        server.leases.delete(payload.tile_id);
        return respond(409, { detail: "lease expired", kind: "lease" });
      }
      if (!TASK_CLASSES.roof_material.includes(payload.label)) {
        return respond(422, { detail: "bad label", kind: "validation" });
      }
      server.leases.delete(payload.tile_id);
      server.labels.set(payload.tile_id, payload.label);
      return respond(200, { labeled: server.labels.size, total: server.tiles.length });
    }
    if (url.includes("/api/release")) {
      const payload = JSON.parse(String(init?.body));
      server.leases.delete(payload.tile_id);
      return respond(200, { released: payload.tile_id });
    }
    if (url.includes("/api/progress")) {
      const perClass: Record<string, number> = {};
      for (const label of server.labels.values()) {
        perClass[label] = (perClass[label] ?? 0) + 1;
      }
      return respond(200, {
        task: "roof_material", labeled: server.labels.size,
        total: server.tiles.length, per_class: perClass,
      });
    }
    return respond(404, { detail: "nope" });
  };
}

describe("UiSession", () => {
  let server: FakeServer;
  let session: UiSession;
  let now: number;

  beforeEach(() => {
    server = makeServer(5);
    now = 100_000;
    session = new UiSession(new ApiClient("", fakeFetch(server)), "roof_material", "ana", () => now);
  });

  it("labels a tile via keyboard and advances", async () => {
    await session.nextTile();
    expect(session.state.kind).toBe("labeling");
    await session.handleKey("1");
    expect(server.labels.get("t000")).toBe("Healthy metal");
    expect(session.lease?.tileId).toBe("t001"); // optimistic advance fetched the next tile
  });

  it("never issues a request for an invalid key", async () => {
    await session.nextTile();
    const before = server.requests.length;
    await session.handleKey("9");
    await session.handleKey("x");
    expect(server.requests.length).toBe(before);
    expect(session.lease?.tileId).toBe("t000");
  });

  it("never reaches a 422 through the keyboard surface", async () => {
    await session.nextTile();
    for (const key of ["1", "2", "3", "4", "5", "0", "7", "a"]) {
      await session.handleKey(key);
    }
    expect(server.requests.filter((r) => r.status === 422)).toHaveLength(0);
  });

  it("holds at most one lease", async () => {
    await session.nextTile();
    const first = session.lease?.tileId;
    await session.nextTile(); // must be a no-op while a lease is live
    expect(session.lease?.tileId).toBe(first);
    expect(server.leases.size).toBe(1);
  });

  it("skip releases the lease and fetches the next tile", async () => {
    await session.nextTile();
    expect(server.leases.has("t000")).toBe(true);
    await session.handleKey("0");
    expect(server.leases.has("t000")).toBe(false);
    expect(session.lease?.tileId).toBe("t001");
  });

  it("drains the queue to a done state with final progress", async () => {
    await session.nextTile();
    while (session.state.kind === "labeling") {
      await session.handleKey("2");
    }
    expect(session.state.kind).toBe("done");
    expect(session.progress?.labeled).toBe(5);
    expect(session.progress?.per_class["Irregular metal"]).toBe(5);
  });

  it("409 surfaces a banner and auto-fetches the next tile", async () => {
    await session.nextTile();
    server.conflictOnce.add("t000");
    await session.handleKey("1");
    expect(session.banner).toMatch(/lease/i);
    expect(session.state.kind).toBe("labeling"); // auto-advanced
    expect(server.labels.has("t000")).toBe(false);
  });

  it("client-side lease expiry drops the lease and refetches", async () => {
    await session.nextTile();
    expect(session.leaseExpired()).toBe(false);
    now += 31_000;
    expect(session.leaseExpired()).toBe(true);
    server.leases.clear(); // server expired it too
    await session.checkLease();
    expect(session.banner).toMatch(/expired/i);
    expect(session.state.kind).toBe("labeling");
  });

  it("offline submits queue and drain on reconnect", async () => {
    await session.nextTile();
    const leased = session.lease!.tileId;
    server.offline = true;
    await session.submitLabel("Incomplete");
    expect(session.retryQueue).toHaveLength(1);
    expect(session.banner).toMatch(/offline/i);

    server.offline = false;
    server.leases.clear();
    const sent = await session.drainRetryQueue();
    expect(sent).toBe(1);
    expect(server.labels.get(leased)).toBe("Incomplete");
    expect(session.retryQueue).toHaveLength(0);
    expect(session.banner).toBeNull();
  });
});
