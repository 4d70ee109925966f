import type { RowRef } from "../api";
import type { AppController } from "../controller";
import { formatContribution, formatProbability, formatRowTime } from "../format";
import { applyTableOps } from "../tableOps";
import { catalogIndex, categoriesOf, compareTableRows, type CompareRow } from "../viewModel";
import {
  contributionCell,
  el,
  emptyState,
  errorBox,
  filterBar,
  loadingBox,
  sortHeader,
} from "./common";

function sidePicker(controller: AppController, side: "a" | "b"): HTMLElement {
  const rows = controller.data.rows;
  const pick = el("select", { "data-testid": `side-${side}-picker` });
  pick.append(el("option", { value: "" }, [`reading ${side.toUpperCase()}`]));
  if (rows.status === "ready") {
    for (const row of rows.data.rows) {
      const option = el("option", { value: String(row.row_id) }, [
        `${rows.data.entity_id} ${formatRowTime(row.row_id)}`,
      ]);
      if (controller.state.comparison[side]?.row_id === row.row_id) {
        option.selected = true;
      }
      pick.append(option);
    }
    pick.addEventListener("change", () => {
      if (pick.value !== "") {
        const ref: RowRef = { entity_id: rows.data.entity_id, row_id: Number(pick.value) };
        void controller.setCompareSide(side, ref);
      }
    });
  }
  return pick;
}

/** Two readings side by side; the delta column is served by the API. */
export function renderCompare(controller: AppController): HTMLElement {
  const root = el("section", { class: "tab-panel", "data-testid": "panel-compare" });
  root.append(
    el("div", { class: "picker-bar" }, [
      sidePicker(controller, "a"),
      sidePicker(controller, "b"),
    ]),
  );

  const { a, b } = controller.state.comparison;
  if (!a || !b) {
    root.append(emptyState("pick two readings to compare"));
    return root;
  }

  const slot = controller.data.compare;
  if (slot.status === "loading" || slot.status === "idle") {
    root.append(loadingBox());
    return root;
  }
  if (slot.status === "error") {
    root.append(errorBox(controller, "compare", slot.message));
    return root;
  }
  const data = slot.data;

  root.append(
    el("div", { class: "prediction-summary", "data-testid": "compare-summary" }, [
      el("span", {}, [
        `A: ${data.row_a.entity_id} ${formatRowTime(data.row_a.row_id)} ` +
          `(${formatProbability(data.row_a.probability)})`,
      ]),
      el("span", {}, [
        `B: ${data.row_b.entity_id} ${formatRowTime(data.row_b.row_id)} ` +
          `(${formatProbability(data.row_b.probability)})`,
      ]),
    ]),
  );

  const features = controller.data.features;
  const catalog = features.status === "ready" ? catalogIndex(features.data) : new Map();
  const categories = features.status === "ready" ? categoriesOf(features.data) : [];
  root.append(filterBar(controller, categories));

  const rows = applyTableOps(
    compareTableRows(data, catalog),
    controller.state.filter,
    controller.state.sort,
  ) as CompareRow[];
  if (rows.length === 0) {
    root.append(emptyState("no matching features"));
    return root;
  }

  const body = el("tbody");
  for (const row of rows) {
    body.append(
      el("tr", { "data-testid": `compare-row-${row.name}` }, [
        el("td", {}, [row.displayName]),
        el("td", {}, [row.category]),
        el("td", {}, [row.record.value_a]),
        el("td", {}, [row.record.value_b]),
        (() => {
          const cell = contributionCell(
            row.record.delta_contribution,
            formatContribution(row.record.delta_contribution),
          );
          cell.setAttribute("data-testid", `delta-${row.name}`);
          return cell;
        })(),
      ]),
    );
  }
  root.append(
    el("table", { class: "feature-table", "data-testid": "compare-table" }, [
      el("thead", {}, [
        el("tr", {}, [
          el("th", {}, [sortHeader(controller, "name", "Feature")]),
          el("th", {}, [sortHeader(controller, "category", "Category")]),
          el("th", {}, ["Reading A"]),
          el("th", {}, ["Reading B"]),
          el("th", {}, [
            sortHeader(controller, "abs_contribution", "Δ contribution"),
            sortHeader(controller, "contribution", "signed"),
          ]),
        ]),
      ]),
      body,
    ]),
  );
  return root;
}
