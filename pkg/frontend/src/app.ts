import type { AppController } from "./controller";
import { TABS, type TabId } from "./state";
import { el } from "./views/common";
import { renderCompare } from "./views/compare";
import { renderExploreFeature } from "./views/exploreFeature";
import { renderExplorePrediction } from "./views/explorePrediction";
import { renderSimilarTurbines } from "./views/similarTurbines";
import { renderUnderstandModel } from "./views/understandModel";

const TAB_LABELS: Record<TabId, string> = {
  explore_prediction: "Explore a prediction",
  similar_turbines: "Similar turbines",
  compare: "Compare",
  understand_model: "Understand the model",
  explore_feature: "Explore a feature",
};

function renderActive(controller: AppController): HTMLElement {
  switch (controller.state.activeTab) {
    case "explore_prediction":
      return renderExplorePrediction(controller);
    case "similar_turbines":
      return renderSimilarTurbines(controller);
    case "compare":
      return renderCompare(controller);
    case "understand_model":
      return renderUnderstandModel(controller);
    case "explore_feature":
      return renderExploreFeature(controller);
  }
}

/** Attach the app to a root element; re-renders on every state change. */
export function mount(root: HTMLElement, controller: AppController): void {
  const render = () => {
    root.textContent = "";
    const nav = el("nav", { class: "tab-bar", role: "tablist" });
    for (const tab of TABS) {
      const button = el(
        "button",
        {
          type: "button",
          role: "tab",
          "data-testid": `tab-${tab}`,
          "aria-selected": String(controller.state.activeTab === tab),
        },
        [TAB_LABELS[tab]],
      );
      button.addEventListener("click", () => void controller.setTab(tab));
      nav.append(button);
    }
    root.append(
      el("header", { class: "app-header" }, [
        el("h1", {}, ["brakewatch"]),
        el("p", { class: "tagline" }, ["brakepad failure decision support"]),
      ]),
      nav,
      el("main", {}, [renderActive(controller)]),
    );
  };
  controller.subscribe(render);
  render();
}
