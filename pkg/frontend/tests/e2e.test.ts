/**
 * Scripted end-to-end navigation against the real HTTP service.
 *
 * Spawns the Python service, loads the bundled demo task at bound 4 through
 * the UI, and checks the full cycle: count 2 with the get-ready facet at 100%
 * significance, enforce it (count 1, no facets), undo (exact prior snapshot),
 * plus an exact-fraction probability query.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { createApp } from "../src/app.js";
import type { Controller } from "../src/controller.js";

const PORT = 8902;
const BASE = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = join(dirname(fileURLToPath(import.meta.url)), "..", "..");

let service: ChildProcess;

async function sleep(ms: number): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, ms));
}

async function waitFor(check: () => boolean, what: string, timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (check()) return;
    await sleep(25);
  }
  throw new Error(`timed out waiting for ${what}`);
}

beforeAll(async () => {
  service = spawn("python3", ["-m", "planspace.cli", "serve", "--port", String(PORT)], {
    cwd: REPO_ROOT,
    stdio: "ignore",
  });
  const deadline = Date.now() + 60_000;
  for (;;) {
    try {
      await fetch(`${BASE}/spaces/probe`);
      return; // any HTTP response (even 404) means the service is up
    } catch {
      if (Date.now() > deadline) throw new Error("service did not come up");
      await sleep(200);
    }
  }
});

afterAll(() => {
  service?.kill();
});

function text(root: HTMLElement, testId: string): string | null {
  const node = root.querySelector(`[data-testid="${testId}"]`);
  return node ? node.textContent : null;
}

function click(root: HTMLElement, testId: string): void {
  const node = root.querySelector(`[data-testid="${testId}"]`) as HTMLButtonElement | null;
  if (!node) throw new Error(`no element ${testId}`);
  node.click();
}

describe("end-to-end navigation", () => {
  let root: HTMLElement;
  let controller: Controller;

  it("walks the enforce/undo cycle on the demo task", async () => {
    root = document.createElement("div");
    document.body.append(root);
    controller = createApp(root, BASE);

    const taskJson = readFileSync(join(REPO_ROOT, "tasks", "talk.json"), "utf-8");
    const input = root.querySelector('[data-testid="task-input"]') as HTMLTextAreaElement;
    input.value = taskJson;
    const bound = root.querySelector('[data-testid="bound-input"]') as HTMLInputElement;
    bound.value = "4";
    click(root, "load-button");
    await waitFor(() => controller.state.phase === "ready", "space to load");

    // Initial snapshot: two plans, one facet operator at 100% significance.
    expect(text(root, "count")).toBe("2");
    expect(text(root, "facet-count")).toBe("facet count: 2");
    expect(root.querySelector('[data-testid="facet-row-get-ready"]')).toBeTruthy();
    expect(text(root, "sig-include-get-ready")).toBe("1/1 (100%)");
    expect(text(root, "sig-exclude-get-ready")).toBe("1/1 (100%)");
    const before = JSON.stringify(controller.state.snapshot);

    // Enforce the facet: the space is fully determined.
    click(root, "enforce-get-ready");
    await waitFor(() => text(root, "count") === "1", "count to drop to 1");
    expect(root.querySelector('[data-testid="facet-table"]')).toBeNull();
    expect(text(root, "no-facets")).toBe("plan space fully determined");
    expect(controller.state.snapshot?.commitments).toEqual([
      { kind: "enforce", operator: "get-ready" },
    ]);
    for (const plan of controller.state.snapshot!.plans) {
      expect(plan).toContain("get-ready");
    }

    // Undo restores the exact prior snapshot.
    click(root, "undo");
    await waitFor(() => text(root, "count") === "2", "count to return to 2");
    expect(JSON.stringify(controller.state.snapshot)).toBe(before);

    // Conflicting commitment surfaces inline and changes nothing.
    click(root, "enforce-get-ready");
    await waitFor(() => text(root, "count") === "1", "second enforce");
    const narrowed = JSON.stringify(controller.state.snapshot);
    await controller.commit({ kind: "enforce", operator: "sleep" });
    await waitFor(() => text(root, "conflict") !== null, "conflict banner");
    expect(text(root, "conflict")).toBe("would eliminate all plans");
    expect(JSON.stringify(controller.state.snapshot)).toBe(narrowed);

    // Breadcrumb: back to the base state.
    click(root, "crumb-base");
    await waitFor(() => text(root, "count") === "2", "breadcrumb undo");
    expect(JSON.stringify(controller.state.snapshot)).toBe(before);

    // Exact-fraction probability query.
    const query = root.querySelector('[data-testid="query-input"]') as HTMLInputElement;
    query.value = "op:wake-up";
    click(root, "query-run");
    await waitFor(() => text(root, "query-result") !== null, "probability result");
    expect(text(root, "query-result")).toBe("1/1 (100%)");
  });
});
