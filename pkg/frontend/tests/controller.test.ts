/**
 * Controller behavior against a scripted fetch: commit re-rendering, 409
 * surfacing, retry banners that preserve the session, the single-mutation
 * guard, and exact count strings in the DOM.
 */

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { createApp } from "../src/app.js";
import type { Snapshot } from "../src/api.js";

type Responder = (method: string, path: string, body: unknown) => { status: number; body: unknown };

function scriptFetch(responder: Responder) {
  const calls: { method: string; path: string; body: unknown }[] = [];
  const stub = vi.fn(async (url: string, init?: RequestInit) => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    calls.push({ method, path, body });
    const out = responder(method, path, body);
    return {
      ok: out.status >= 200 && out.status < 300,
      status: out.status,
      statusText: String(out.status),
      json: async () => out.body,
    };
  });
  vi.stubGlobal("fetch", stub);
  return { stub, calls };
}

const TASK = { atoms: [], operators: [], init: {}, goal: {} };

const baseSnapshot: Snapshot = {
  count: "2",
  commitments: [],
  facet_count: 2,
  facets: [
    { operator: "get-ready", sign: "include", significance: { num: "2", den: "2" } },
    { operator: "get-ready", sign: "exclude", significance: { num: "2", den: "2" } },
  ],
  plans: [["wake-up", "give-talk"]],
};

const narrowedSnapshot: Snapshot = {
  count: "1",
  commitments: [{ kind: "enforce", operator: "get-ready" }],
  facet_count: 0,
  facets: [],
  plans: [["wake-up", "get-ready", "give-talk"]],
};

function happyPathResponder(commitResponse: () => { status: number; body: unknown }): Responder {
  return (method, path) => {
    if (path === "/tasks") return { status: 200, body: { task_id: "t1" } };
    if (path === "/tasks/t1/spaces") return { status: 200, body: { space_id: "s1", count: "2" } };
    if (path === "/spaces/s1" && method === "GET") {
      return {
        status: 200,
        body: {
          count: "2",
          length: 4,
          has_plans: true,
          brave: ["get-ready", "give-talk", "wake-up"],
          cautious: ["give-talk", "wake-up"],
          facets: [
            { operator: "get-ready", sign: "include" },
            { operator: "get-ready", sign: "exclude" },
          ],
        },
      };
    }
    if (path === "/spaces/s1/sessions") {
      return { status: 200, body: { session_id: "sess", snapshot: baseSnapshot } };
    }
    if (path === "/sessions/sess/commit") return commitResponse();
    if (path === "/sessions/sess/undo") return { status: 200, body: baseSnapshot };
    if (path === "/spaces/s1/prob") return { status: 200, body: { num: "1", den: "1" } };
    throw new Error(`unexpected request ${method} ${path}`);
  };
}

async function settle(): Promise<void> {
  for (let i = 0; i < 20; i += 1) {
    await Promise.resolve();
  }
}

describe("controller over a scripted service", () => {
  let root: HTMLElement;

  beforeEach(() => {
    root = document.createElement("div");
    document.body.append(root);
  });

  afterEach(() => {
    vi.unstubAllGlobals();
    root.remove();
  });

  async function loadedApp(commitResponse: () => { status: number; body: unknown }) {
    scriptFetch(happyPathResponder(commitResponse));
    const controller = createApp(root, "http://service");
    await controller.loadTask(JSON.stringify(TASK), 4);
    expect(controller.state.phase).toBe("ready");
    return controller;
  }

  it("renders the transported count string and facet table after load", async () => {
    const controller = await loadedApp(() => ({ status: 200, body: narrowedSnapshot }));
    expect(root.querySelector('[data-testid="count"]')?.textContent).toBe("2");
    expect(root.querySelector('[data-testid="facet-row-get-ready"]')).toBeTruthy();
    expect(
      root.querySelector('[data-testid="sig-include-get-ready"]')?.textContent,
    ).toBe("1/1 (100%)");
    expect(controller.state.sessionId).toBe("sess");
  });

  it("re-renders from the fresh snapshot after a commit", async () => {
    const controller = await loadedApp(() => ({ status: 200, body: narrowedSnapshot }));
    await controller.enforce("get-ready");
    expect(root.querySelector('[data-testid="count"]')?.textContent).toBe("1");
    expect(root.querySelector('[data-testid="no-facets"]')?.textContent).toContain(
      "fully determined",
    );
    await controller.undo();
    expect(root.querySelector('[data-testid="count"]')?.textContent).toBe("2");
  });

  it("surfaces 409 conflicts inline and keeps the snapshot", async () => {
    const controller = await loadedApp(() => ({
      status: 409,
      body: { detail: "would eliminate all plans" },
    }));
    await controller.enforce("get-ready");
    expect(root.querySelector('[data-testid="conflict"]')?.textContent).toBe(
      "would eliminate all plans",
    );
    expect(root.querySelector('[data-testid="count"]')?.textContent).toBe("2");
    expect(controller.state.snapshot).toEqual(baseSnapshot);
  });

  it("offers a retry banner on 5xx and preserves the session", async () => {
    let failures = 1;
    const controller = await loadedApp(() => {
      if (failures > 0) {
        failures -= 1;
        return { status: 503, body: { detail: "budget exceeded" } };
      }
      return { status: 200, body: narrowedSnapshot };
    });
    await controller.enforce("get-ready");
    expect(root.querySelector('[data-testid="banner"]')?.textContent).toContain(
      "budget exceeded",
    );
    expect(controller.state.sessionId).toBe("sess");
    expect(controller.state.snapshot).toEqual(baseSnapshot);

    (root.querySelector('[data-testid="retry"]') as HTMLButtonElement).click();
    await settle();
    expect(controller.state.snapshot).toEqual(narrowedSnapshot);
    expect(root.querySelector('[data-testid="banner"]')).toBeNull();
  });

  it("allows at most one in-flight mutation", async () => {
    let resolveCommit: (() => void) | null = null;
    const gate = new Promise<void>((resolve) => {
      resolveCommit = resolve;
    });
    const { stub } = scriptFetch(happyPathResponder(() => ({ status: 200, body: narrowedSnapshot })));
    const controller = createApp(root, "http://service");
    await controller.loadTask(JSON.stringify(TASK), 4);

    const originalImpl = stub.getMockImplementation()!;
    stub.mockImplementation(async (url: string, init?: RequestInit) => {
      if (url.endsWith("/commit")) {
        await gate;
      }
      return originalImpl(url, init);
    });
    const callsBefore = stub.mock.calls.length;
    const first = controller.enforce("get-ready");
    await settle();
    const second = controller.enforce("get-ready");
    await settle();
    expect(stub.mock.calls.length).toBe(callsBefore + 1); // the second click is dropped
    resolveCommit!();
    await Promise.all([first, second]);
    expect(controller.state.snapshot).toEqual(narrowedSnapshot);
  });

  it("shows probability results as exact fractions", async () => {
    const controller = await loadedApp(() => ({ status: 200, body: narrowedSnapshot }));
    await controller.runQuery("op:wake-up");
    expect(root.querySelector('[data-testid="query-result"]')?.textContent).toBe("1/1 (100%)");
  });

  it("never coerces huge counts", async () => {
    const huge = "2061138519356781760670618805653750167349287991336595876373";
    scriptFetch((method, path) => {
      const responder = happyPathResponder(() => ({ status: 200, body: narrowedSnapshot }));
      if (path === "/spaces/s1/sessions") {
        return {
          status: 200,
          body: { session_id: "sess", snapshot: { ...baseSnapshot, count: huge } },
        };
      }
      return responder(method, path, undefined);
    });
    const controller = createApp(root, "http://service");
    await controller.loadTask(JSON.stringify(TASK), 4);
    expect(controller.state.phase).toBe("ready");
    expect(root.querySelector('[data-testid="count"]')?.textContent).toBe(huge);
  });

  it("reports malformed tasks as setup errors", async () => {
    scriptFetch(happyPathResponder(() => ({ status: 200, body: narrowedSnapshot })));
    const controller = createApp(root, "http://service");
    await controller.loadTask("{not json", 4);
    expect(controller.state.phase).toBe("setup");
    expect(root.querySelector('[data-testid="setup-error"]')?.textContent).toContain(
      "not valid JSON",
    );
  });
});
