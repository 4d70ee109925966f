import type { AppController } from "../controller";
import { formatContribution, formatLabel, formatMargin, formatProbability, formatRowTime } from "../format";
import { applyTableOps } from "../tableOps";
import { catalogIndex, categoriesOf, contributionRows } from "../viewModel";
import {
  contributionCell,
  el,
  emptyState,
  errorBox,
  filterBar,
  loadingBox,
  sortHeader,
} from "./common";

function pickers(controller: AppController): HTMLElement {
  const bar = el("div", { class: "picker-bar" });
  const entities = controller.data.entities;
  if (entities.status === "ready") {
    const entityPick = el("select", { "data-testid": "entity-picker" });
    for (const id of entities.data.entities) {
      const option = el("option", { value: id }, [id]);
      if (controller.state.selectedRow?.entity_id === id) {
        option.selected = true;
      }
      entityPick.append(option);
    }
    entityPick.addEventListener("change", () => void controller.selectEntity(entityPick.value));
    bar.append(entityPick);
  }
  const rows = controller.data.rows;
  if (rows.status === "ready") {
    const rowPick = el("select", { "data-testid": "row-picker" });
    for (const row of rows.data.rows) {
      const option = el("option", { value: String(row.row_id) }, [formatRowTime(row.row_id)]);
      if (controller.state.selectedRow?.row_id === row.row_id) {
        option.selected = true;
      }
      rowPick.append(option);
    }
    rowPick.addEventListener("change", () =>
      void controller.openRow({
        entity_id: rows.data.entity_id,
        row_id: Number(rowPick.value),
      }),
    );
    bar.append(rowPick);
  }
  return bar;
}

/** Single-reading explanation: prediction header plus contribution table. */
export function renderExplorePrediction(controller: AppController): HTMLElement {
  const root = el("section", { class: "tab-panel", "data-testid": "panel-explore_prediction" });
  root.append(pickers(controller));

  if (!controller.state.selectedRow) {
    root.append(emptyState("pick a turbine reading to explain"));
    return root;
  }

  const slot = controller.data.contributions;
  if (slot.status === "loading" || slot.status === "idle") {
    root.append(loadingBox());
    return root;
  }
  if (slot.status === "error") {
    root.append(errorBox(controller, "contributions", slot.message));
    return root;
  }
  const data = slot.data;

  root.append(
    el("div", { class: "prediction-summary", "data-testid": "prediction-summary" }, [
      el("span", { class: "probability" }, [formatProbability(data.probability)]),
      el("span", { class: "summary-detail" }, [
        `failure risk for ${data.entity_id} at ${formatRowTime(data.row_id)}`,
      ]),
      el("span", { class: "summary-detail", "data-testid": "margin" }, [
        `margin ${formatMargin(data.margin)}`,
      ]),
      el("span", { class: "summary-detail" }, [formatLabel(data.label)]),
    ]),
  );

  const features = controller.data.features;
  const catalog = features.status === "ready" ? catalogIndex(features.data) : new Map();
  const categories = features.status === "ready" ? categoriesOf(features.data) : [];
  root.append(filterBar(controller, categories));

  const rows = applyTableOps(
    contributionRows(data, catalog),
    controller.state.filter,
    controller.state.sort,
  );
  if (rows.length === 0) {
    root.append(emptyState("no matching features"));
    return root;
  }

  const head = el("tr", {}, [
    el("th", {}, [sortHeader(controller, "name", "Feature")]),
    el("th", {}, [sortHeader(controller, "category", "Category")]),
    el("th", {}, ["Value"]),
    el("th", {}, [
      sortHeader(controller, "abs_contribution", "Contribution"),
      sortHeader(controller, "contribution", "signed"),
    ]),
  ]);
  const body = el("tbody");
  for (const row of rows) {
    body.append(
      el("tr", { "data-testid": `feature-row-${row.name}` }, [
        el("td", {}, [row.displayName]),
        el("td", {}, [row.category]),
        el("td", { "data-testid": `value-${row.name}` }, [row.value]),
        contributionCell(row.contribution, formatContribution(row.contribution)),
      ]),
    );
  }
  root.append(
    el("table", { class: "feature-table", "data-testid": "contrib-table" }, [
      el("thead", {}, [head]),
      body,
    ]),
  );
  return root;
}
