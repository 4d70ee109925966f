import { describe, expect, it } from "vitest";
import {
  TABS,
  drillToFeature,
  drillToRow,
  initialViewState,
  selectFeature,
  setComparisonSide,
  toggleCategory,
} from "../src/state";
import { DEFAULT_FLAGS, flagsFromQuery } from "../src/flags";

describe("view state", () => {
  it("exposes exactly the five tabs in order", () => {
    expect([...TABS]).toEqual([
      "explore_prediction",
      "similar_turbines",
      "compare",
      "understand_model",
      "explore_feature",
    ]);
  });

  it("starts on the prediction tab with magnitude-descending sort", () => {
    const state = initialViewState();
    expect(state.activeTab).toBe("explore_prediction");
    expect(state.sort).toEqual({ key: "abs_contribution", descending: true });
    expect(state.filter.name).toBe("");
    expect(state.filter.categories.size).toBe(0);
    expect(state.importanceMethod).toBe("gain");
    expect(state.selectedRow).toBeNull();
  });

  it("toggleCategory adds then removes", () => {
    let state = initialViewState();
    state = toggleCategory(state, "brake");
    expect(state.filter.categories.has("brake")).toBe(true);
    state = toggleCategory(state, "brake");
    expect(state.filter.categories.has("brake")).toBe(false);
  });

  it("state transitions return fresh objects", () => {
    const state = initialViewState();
    const next = selectFeature(state, "brake_caliper_temp_c");
    expect(state.selectedFeature).toBeNull();
    expect(next.selectedFeature).toBe("brake_caliper_temp_c");
  });

  it("drillToRow lands on the prediction tab with that row selected", () => {
    const ref = { entity_id: "T02", row_id: 17 };
    const state = drillToRow(
      { ...initialViewState(), activeTab: "explore_feature" },
      ref,
    );
    expect(state.activeTab).toBe("explore_prediction");
    expect(state.selectedRow).toEqual(ref);
  });

  it("drillToFeature lands on the feature tab with that feature selected", () => {
    const state = drillToFeature(initialViewState(), "wind_speed_m_s");
    expect(state.activeTab).toBe("explore_feature");
    expect(state.selectedFeature).toBe("wind_speed_m_s");
  });

  it("comparison sides are independent", () => {
    let state = initialViewState();
    state = setComparisonSide(state, "a", { entity_id: "T01", row_id: 1 });
    state = setComparisonSide(state, "b", { entity_id: "T01", row_id: 1 });
    expect(state.comparison.a).toEqual(state.comparison.b);
    state = setComparisonSide(state, "b", { entity_id: "T02", row_id: 9 });
    expect(state.comparison.a).toEqual({ entity_id: "T01", row_id: 1 });
    expect(state.comparison.b).toEqual({ entity_id: "T02", row_id: 9 });
  });
});

describe("feature flags", () => {
  it("reverse drilldown ships off", () => {
    expect(DEFAULT_FLAGS.reverseDrilldown).toBe(false);
    expect(flagsFromQuery("").reverseDrilldown).toBe(false);
  });

  it("can be switched on from the query string", () => {
    expect(flagsFromQuery("?flags=reverseDrilldown").reverseDrilldown).toBe(true);
    expect(flagsFromQuery("?flags=other,reverseDrilldown").reverseDrilldown).toBe(true);
    expect(flagsFromQuery("?flags=other").reverseDrilldown).toBe(false);
  });
});
