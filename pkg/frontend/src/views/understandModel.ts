import type { AppController } from "../controller";
import { applyTableOps } from "../tableOps";
import { catalogIndex, categoriesOf, importanceRows } from "../viewModel";
import { contributionCell, el, emptyState, errorBox, filterBar, loadingBox, sortHeader } from "./common";

const METHODS = [
  ["gain", "split gain"],
  ["mean_abs_shap", "mean |contribution|"],
  ["signed_mean_shap", "signed mean contribution"],
] as const;

/** Model-level view: which features the model leans on overall. */
export function renderUnderstandModel(controller: AppController): HTMLElement {
  const root = el("section", { class: "tab-panel", "data-testid": "panel-understand_model" });

  const toggle = el("div", { class: "method-toggle", role: "radiogroup" });
  for (const [method, label] of METHODS) {
    const radio = el("input", {
      type: "radio",
      name: "importance-method",
      "data-testid": `method-${method}`,
    });
    radio.checked = controller.state.importanceMethod === method;
    radio.addEventListener("change", () => void controller.setMethod(method));
    toggle.append(el("label", { class: "method-option" }, [radio, label]));
  }
  root.append(toggle);

  const slot = controller.data.importance;
  if (slot.status === "loading" || slot.status === "idle") {
    root.append(loadingBox());
    return root;
  }
  if (slot.status === "error") {
    root.append(errorBox(controller, "importance", slot.message));
    return root;
  }
  const data = slot.data;

  root.append(
    el("p", { class: "method-note", "data-testid": "method-note" }, [
      data.normalized
        ? "scores are normalized and sum to 1"
        : "signed scores keep direction and are not normalized",
    ]),
  );

  const features = controller.data.features;
  const catalog = features.status === "ready" ? catalogIndex(features.data) : new Map();
  const categories = features.status === "ready" ? categoriesOf(features.data) : [];
  root.append(filterBar(controller, categories));

  const rows = applyTableOps(
    importanceRows(data, catalog),
    controller.state.filter,
    controller.state.sort,
  );
  if (rows.length === 0) {
    root.append(emptyState("no matching features"));
    return root;
  }

  const body = el("tbody");
  for (const row of rows) {
    const cells = [
      el("td", {}, [row.displayName]),
      el("td", {}, [row.category]),
      contributionCell(row.contribution, row.value),
    ];
    const tr = el("tr", { "data-testid": `importance-row-${row.name}` }, cells);
    if (controller.flags.reverseDrilldown) {
      const drill = el(
        "button",
        { type: "button", "data-testid": `drill-${row.name}` },
        ["inspect"],
      );
      drill.addEventListener("click", () => void controller.drillToFeature(row.name));
      tr.append(el("td", {}, [drill]));
    }
    body.append(tr);
  }
  root.append(
    el("table", { class: "feature-table", "data-testid": "importance-table" }, [
      el("thead", {}, [
        el("tr", {}, [
          el("th", {}, [sortHeader(controller, "name", "Feature")]),
          el("th", {}, [sortHeader(controller, "category", "Category")]),
          el("th", {}, [
            sortHeader(controller, "abs_contribution", "Score"),
            sortHeader(controller, "contribution", "signed"),
          ]),
          ...(controller.flags.reverseDrilldown ? [el("th", {}, [""])] : []),
        ]),
      ]),
      body,
    ]),
  );
  return root;
}
