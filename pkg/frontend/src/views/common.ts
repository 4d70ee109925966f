import type { AppController, SlotName } from "../controller";
import type { SortKey } from "../state";
import type { FeatureRow } from "../tableOps";

type Child = Node | string;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: Child[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function loadingBox(): HTMLElement {
  return el("div", { class: "loading", "data-testid": "loading" }, ["loading"]);
}

export function errorBox(controller: AppController, slot: SlotName, message: string): HTMLElement {
  const retry = el("button", { "data-testid": "retry", type: "button" }, ["Retry"]);
  retry.addEventListener("click", () => void controller.retry(slot));
  return el("div", { class: "error-box", role: "alert", "data-testid": "error-box" }, [
    el("p", {}, [`could not load: ${message}`]),
    retry,
  ]);
}

export function emptyState(text: string): HTMLElement {
  return el("div", { class: "empty-state", "data-testid": "empty-state" }, [text]);
}

/** Shared name + category filter bar; purely dispatches state changes. */
export function filterBar(controller: AppController, categories: string[]): HTMLElement {
  const name = el("input", {
    type: "search",
    placeholder: "filter by name",
    "data-testid": "name-filter",
  });
  name.value = controller.state.filter.name;
  name.addEventListener("input", () => controller.setNameFilter(name.value));

  const boxes = categories.map((category) => {
    const box = el("input", { type: "checkbox", "data-testid": `category-${category}` });
    box.checked = controller.state.filter.categories.has(category);
    box.addEventListener("change", () => controller.toggleCategory(category));
    return el("label", { class: "category-toggle" }, [box, category]);
  });

  return el("div", { class: "filter-bar" }, [name, ...boxes]);
}

export function sortHeader(
  controller: AppController,
  key: SortKey,
  label: string,
): HTMLElement {
  const active = controller.state.sort.key === key;
  const arrow = active ? (controller.state.sort.descending ? " ▼" : " ▲") : "";
  const button = el(
    "button",
    { type: "button", "data-testid": `sort-${key}`, "aria-pressed": String(active) },
    [label + arrow],
  );
  button.addEventListener("click", () => controller.setSort(key));
  return button;
}

export function contributionCell(value: number, text: string): HTMLElement {
  const cls = value > 0 ? "contribution pos" : value < 0 ? "contribution neg" : "contribution";
  return el("td", { class: cls }, [text]);
}

export function featureRowId(row: FeatureRow): string {
  return `feature-row-${row.name}`;
}
