import type { AppController } from "../controller";
import { formatDistance, formatLabel, formatRowTime } from "../format";
import { el, emptyState, errorBox, loadingBox } from "./common";

/** Case retrieval: readings closest to the selected one, nearest first. */
export function renderSimilarTurbines(controller: AppController): HTMLElement {
  const root = el("section", { class: "tab-panel", "data-testid": "panel-similar_turbines" });
  const selected = controller.state.selectedRow;
  if (!selected) {
    root.append(emptyState("pick a turbine reading first"));
    return root;
  }

  const slot = controller.data.similar;
  if (slot.status === "loading" || slot.status === "idle") {
    root.append(loadingBox());
    return root;
  }
  if (slot.status === "error") {
    root.append(errorBox(controller, "similar", slot.message));
    return root;
  }

  const body = el("tbody");
  for (const neighbor of slot.data.neighbors) {
    const isSelf =
      neighbor.entity_id === selected.entity_id && neighbor.row_id === selected.row_id;
    const open = el(
      "button",
      {
        type: "button",
        "data-testid": `open-${neighbor.entity_id}-${neighbor.row_id}`,
      },
      ["open"],
    );
    open.addEventListener("click", () =>
      void controller.drillToRow({ entity_id: neighbor.entity_id, row_id: neighbor.row_id }),
    );
    body.append(
      el("tr", { "data-testid": `neighbor-${neighbor.entity_id}-${neighbor.row_id}` }, [
        el("td", {}, [neighbor.entity_id + (isSelf ? " (selected reading)" : "")]),
        el("td", {}, [formatRowTime(neighbor.row_id)]),
        el("td", {}, [formatDistance(neighbor.distance)]),
        el("td", {}, [formatLabel(neighbor.label)]),
        el("td", {}, [open]),
      ]),
    );
  }
  root.append(
    el("table", { class: "feature-table", "data-testid": "neighbor-table" }, [
      el("thead", {}, [
        el("tr", {}, [
          el("th", {}, ["Turbine"]),
          el("th", {}, ["Time"]),
          el("th", {}, ["Distance"]),
          el("th", {}, ["Status"]),
          el("th", {}, [""]),
        ]),
      ]),
      body,
    ]),
  );
  return root;
}
