import type { AppController } from "../controller";
import { MISSING_TOKEN, formatContribution, formatPointValue, formatRowTime } from "../format";
import { scalarFeatures } from "../viewModel";
import { el, emptyState, errorBox, loadingBox } from "./common";
import type { ScatterPoint } from "../types";

function pointTitle(point: ScatterPoint): string {
  return (
    `${point.entity_id} ${formatRowTime(point.row_id)}: ` +
    `${formatPointValue(point.value)}, contribution ${formatContribution(point.contribution)}`
  );
}

/** Map a value into [0, 100] for presentation only. */
function percent(value: number, low: number, high: number): number {
  if (high === low) {
    return 50;
  }
  return ((value - low) / (high - low)) * 100;
}

/** One feature across the fleet: value vs contribution, plus the box summary. */
export function renderExploreFeature(controller: AppController): HTMLElement {
  const root = el("section", { class: "tab-panel", "data-testid": "panel-explore_feature" });

  const features = controller.data.features;
  const picker = el("select", { "data-testid": "feature-picker" });
  picker.append(el("option", { value: "" }, ["pick a feature"]));
  if (features.status === "ready") {
    for (const feature of scalarFeatures(features.data)) {
      const option = el("option", { value: feature.name }, [feature.display_name]);
      if (controller.state.selectedFeature === feature.name) {
        option.selected = true;
      }
      picker.append(option);
    }
  }
  picker.addEventListener("change", () => {
    if (picker.value !== "") {
      void controller.pickFeature(picker.value);
    }
  });
  root.append(el("div", { class: "picker-bar" }, [picker]));

  if (!controller.state.selectedFeature) {
    root.append(emptyState("pick a feature to explore"));
    return root;
  }

  const slot = controller.data.feature;
  if (slot.status === "loading" || slot.status === "idle") {
    root.append(loadingBox());
    return root;
  }
  if (slot.status === "error") {
    root.append(errorBox(controller, "feature", slot.message));
    return root;
  }
  const { scatter, distribution } = slot.data;

  root.append(
    el("dl", { class: "box-stats", "data-testid": "box-stats" }, [
      el("dt", {}, ["min"]), el("dd", {}, [formatPointValue(distribution.minimum)]),
      el("dt", {}, ["q1"]), el("dd", {}, [formatPointValue(distribution.q1)]),
      el("dt", {}, ["median"]), el("dd", {}, [formatPointValue(distribution.median)]),
      el("dt", {}, ["q3"]), el("dd", {}, [formatPointValue(distribution.q3)]),
      el("dt", {}, ["max"]), el("dd", {}, [formatPointValue(distribution.maximum)]),
      el("dt", {}, ["readings"]), el("dd", {}, [String(distribution.count)]),
    ]),
  );

  const plotted = scatter.points.filter((p) => p.value !== null);
  const missing = scatter.points.filter((p) => p.value === null);
  const values = plotted.map((p) => p.value as number);
  const contributions = plotted.map((p) => p.contribution);
  const vLow = Math.min(...values);
  const vHigh = Math.max(...values);
  const cLow = Math.min(...contributions);
  const cHigh = Math.max(...contributions);

  const plot = el("div", { class: "scatter", "data-testid": "scatter" });
  for (const point of plotted) {
    const dot = el("button", {
      type: "button",
      class: "point",
      title: pointTitle(point),
      "data-entity": point.entity_id,
      "data-row": String(point.row_id),
      "data-testid": `point-${point.entity_id}-${point.row_id}`,
    });
    dot.style.left = `${percent(point.value as number, vLow, vHigh)}%`;
    dot.style.bottom = `${percent(point.contribution, cLow, cHigh)}%`;
    dot.addEventListener("click", () =>
      void controller.drillToRow({ entity_id: point.entity_id, row_id: point.row_id }),
    );
    plot.append(dot);
  }
  root.append(plot);

  if (missing.length > 0) {
    const list = el("div", { class: "missing-points", "data-testid": "missing-points" }, [
      `${MISSING_TOKEN} (${missing.length}):`,
    ]);
    for (const point of missing) {
      const chip = el(
        "button",
        {
          type: "button",
          class: "missing-chip",
          title: pointTitle(point),
          "data-testid": `missing-${point.entity_id}-${point.row_id}`,
        },
        [`${point.entity_id} ${formatRowTime(point.row_id)}`],
      );
      chip.addEventListener("click", () =>
        void controller.drillToRow({ entity_id: point.entity_id, row_id: point.row_id }),
      );
      list.append(chip);
    }
    root.append(list);
  }
  return root;
}
