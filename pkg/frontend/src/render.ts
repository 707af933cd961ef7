/**
 * DOM view over the controller state.  Re-rendered wholesale on every state
 * change; counts are inserted as the transported strings, never via Number.
 */

import type { Controller } from "./controller.js";
import type { FacetEntry } from "./api.js";
import { compareFractions, formatFraction, percentOf, type Fraction } from "./fraction.js";

function el(
  tag: string,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

interface FacetRow {
  operator: string;
  include: Fraction | null;
  exclude: Fraction | null;
}

/** One row per operator; excluding facets fold into the same row. */
export function facetRows(entries: FacetEntry[]): FacetRow[] {
  const byOperator = new Map<string, FacetRow>();
  for (const entry of entries) {
    let row = byOperator.get(entry.operator);
    if (!row) {
      row = { operator: entry.operator, include: null, exclude: null };
      byOperator.set(entry.operator, row);
    }
    row[entry.sign === "include" ? "include" : "exclude"] = entry.significance;
  }
  const rows = [...byOperator.values()];
  rows.sort((a, b) => {
    const left = a.include ?? { num: "0", den: "1" };
    const right = b.include ?? { num: "0", den: "1" };
    const order = compareFractions(right, left); // descending significance
    if (order !== 0) return order;
    return a.operator < b.operator ? -1 : a.operator > b.operator ? 1 : 0;
  });
  return rows;
}

function significanceCell(f: Fraction | null): string {
  if (!f) return "-";
  return `${formatFraction(f)} (${percentOf(f)}%)`;
}

function renderSetup(root: HTMLElement, controller: Controller): void {
  const state = controller.state;
  const textarea = el("textarea", {
    "data-testid": "task-input",
    rows: "12",
    placeholder: "paste a task JSON here",
  }) as HTMLTextAreaElement;
  const bound = el("input", {
    "data-testid": "bound-input",
    type: "number",
    min: "0",
    value: "4",
  }) as HTMLInputElement;
  const file = el("input", { type: "file", accept: ".json" }) as HTMLInputElement;
  file.addEventListener("change", () => {
    const chosen = file.files?.[0];
    if (!chosen) return;
    chosen.text().then((text) => {
      textarea.value = text;
    });
  });
  const button = el("button", { "data-testid": "load-button" }, ["Explore plan space"]);
  button.addEventListener("click", () => {
    void controller.loadTask(textarea.value, Number(bound.value));
  });
  root.append(
    el("section", { class: "setup" }, [
      el("h1", {}, ["Plan-space navigator"]),
      el("label", {}, ["Task definition ", file]),
      textarea,
      el("label", {}, ["Length bound ", bound]),
      button,
      state.setupError
        ? el("p", { class: "error", "data-testid": "setup-error" }, [state.setupError])
        : "",
      state.phase === "loading" ? el("p", { "data-testid": "loading" }, ["compiling..."]) : "",
    ]),
  );
}

function renderSummary(root: HTMLElement, controller: Controller): void {
  const summary = controller.state.summary!;
  const chips = (names: string[], kind: string) =>
    el(
      "span",
      { class: `chips ${kind}` },
      names.map((name) => el("span", { class: "chip", "data-chip": kind }, [name])),
    );
  root.append(
    el("section", { class: "summary" }, [
      el("h2", {}, [`Plan space (bound ${summary.length})`]),
      el("p", {}, [
        "plans in space: ",
        el("strong", { "data-testid": "count" }, [controller.state.snapshot!.count]),
      ]),
      el("p", {}, ["in some plan: ", chips(summary.brave, "brave")]),
      el("p", {}, ["in every plan: ", chips(summary.cautious, "cautious")]),
    ]),
  );
}

function renderBreadcrumb(root: HTMLElement, controller: Controller): void {
  const snapshot = controller.state.snapshot!;
  const crumbs: Node[] = [];
  const base = el("button", { "data-testid": "crumb-base", class: "crumb" }, ["start"]);
  base.addEventListener("click", () => void controller.undoTo(-1));
  crumbs.push(base);
  snapshot.commitments.forEach((commitment, index) => {
    const label =
      commitment.kind === "prefix"
        ? `step ${commitment.step}: ${commitment.operator}`
        : `${commitment.kind} ${commitment.operator}`;
    const crumb = el(
      "button",
      { "data-testid": `crumb-${index}`, class: "crumb" },
      [label],
    );
    crumb.addEventListener("click", () => void controller.undoTo(index));
    crumbs.push(crumb);
  });
  const undo = el("button", { "data-testid": "undo", class: "undo" }, ["Undo"]);
  undo.addEventListener("click", () => void controller.undo());
  root.append(
    el("nav", { class: "breadcrumb" }, [...crumbs, undo]),
  );
}

function renderFacets(root: HTMLElement, controller: Controller): void {
  const state = controller.state;
  const snapshot = state.snapshot!;
  const section = el("section", { class: "facets" }, [
    el("h2", {}, ["Facets"]),
    el("p", { "data-testid": "facet-count" }, [`facet count: ${snapshot.facet_count}`]),
  ]);
  if (state.conflict) {
    section.append(el("p", { class: "conflict", "data-testid": "conflict" }, [state.conflict]));
  }
  const rows = facetRows(snapshot.facets);
  if (rows.length === 0) {
    section.append(
      el("p", { "data-testid": "no-facets" }, ["plan space fully determined"]),
    );
  } else {
    const table = el("table", { "data-testid": "facet-table" });
    table.append(
      el("tr", {}, [
        el("th", {}, ["operator"]),
        el("th", {}, ["significance if enforced"]),
        el("th", {}, ["significance if forbidden"]),
        el("th", {}, [""]),
        el("th", {}, [""]),
      ]),
    );
    for (const row of rows) {
      const enforce = el("button", { "data-testid": `enforce-${row.operator}` }, ["Enforce"]);
      enforce.addEventListener("click", () => void controller.enforce(row.operator));
      const forbid = el("button", { "data-testid": `forbid-${row.operator}` }, ["Forbid"]);
      forbid.addEventListener("click", () => void controller.forbid(row.operator));
      if (state.mutating) {
        enforce.setAttribute("disabled", "");
        forbid.setAttribute("disabled", "");
      }
      table.append(
        el("tr", { "data-testid": `facet-row-${row.operator}` }, [
          el("td", {}, [row.operator]),
          el("td", { "data-testid": `sig-include-${row.operator}` }, [
            significanceCell(row.include),
          ]),
          el("td", { "data-testid": `sig-exclude-${row.operator}` }, [
            significanceCell(row.exclude),
          ]),
          el("td", {}, [enforce]),
          el("td", {}, [forbid]),
        ]),
      );
    }
    section.append(table);
  }
  root.append(section);
}

function renderPlans(root: HTMLElement, controller: Controller): void {
  const snapshot = controller.state.snapshot!;
  const list = el("div", { "data-testid": "plans" });
  snapshot.plans.forEach((plan, index) => {
    const steps = el(
      "ol",
      { class: "plan" },
      plan.length ? plan.map((op) => el("li", {}, [op])) : [el("li", { class: "empty" }, ["(empty plan)"])],
    );
    list.append(el("div", { "data-testid": `plan-${index}` }, [steps]));
  });
  root.append(
    el("section", { class: "plans" }, [el("h2", {}, ["Sampled plans"]), list]),
  );
}

function renderQueryBox(root: HTMLElement, controller: Controller): void {
  const probe = controller.state.probe;
  const input = el("input", {
    "data-testid": "query-input",
    placeholder: "op:name | atom:name@2 ; !op:other",
    value: probe.query,
  }) as HTMLInputElement;
  const run = el("button", { "data-testid": "query-run" }, ["Probability"]);
  run.addEventListener("click", () => void controller.runQuery(input.value));
  const section = el("section", { class: "query" }, [
    el("h2", {}, ["Probability query"]),
    input,
    run,
  ]);
  if (probe.result) {
    section.append(
      el("p", { "data-testid": "query-result" }, [
        `${formatFraction(probe.result)} (${percentOf(probe.result)}%)`,
      ]),
    );
  }
  if (probe.error) {
    section.append(el("p", { class: "error", "data-testid": "query-error" }, [probe.error]));
  }
  root.append(section);
}

export function render(root: HTMLElement, controller: Controller): void {
  const state = controller.state;
  root.replaceChildren();
  if (state.banner) {
    const retry = el("button", { "data-testid": "retry" }, ["Retry"]);
    retry.addEventListener("click", () => void state.banner?.retry());
    root.append(
      el("div", { class: "banner", "data-testid": "banner" }, [state.banner.message, " ", retry]),
    );
  }
  if (state.phase !== "ready") {
    renderSetup(root, controller);
    return;
  }
  renderSummary(root, controller);
  renderBreadcrumb(root, controller);
  renderFacets(root, controller);
  renderPlans(root, controller);
  renderQueryBox(root, controller);
}
