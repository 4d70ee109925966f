import type { RowRef } from "./api";

export const TABS = [
  "explore_prediction",
  "similar_turbines",
  "compare",
  "understand_model",
  "explore_feature",
] as const;

export type TabId = (typeof TABS)[number];

export type SortKey = "abs_contribution" | "contribution" | "name" | "category";

export interface SortState {
  key: SortKey;
  descending: boolean;
}

export interface FilterState {
  /** Case-insensitive substring on the feature name; empty matches all. */
  name: string;
  /** Categories to keep; empty set means no category restriction. */
  categories: ReadonlySet<string>;
}

export type ImportanceMethod = "gain" | "mean_abs_shap" | "signed_mean_shap";

export interface ViewState {
  activeTab: TabId;
  selectedRow: RowRef | null;
  sort: SortState;
  filter: FilterState;
  selectedFeature: string | null;
  comparison: { a: RowRef | null; b: RowRef | null };
  importanceMethod: ImportanceMethod;
}

/** Contribution magnitude leads by default so the strongest drivers surface first. */
export const DEFAULT_SORT: SortState = { key: "abs_contribution", descending: true };

export function initialViewState(): ViewState {
  return {
    activeTab: "explore_prediction",
    selectedRow: null,
    sort: DEFAULT_SORT,
    filter: { name: "", categories: new Set() },
    selectedFeature: null,
    comparison: { a: null, b: null },
    importanceMethod: "gain",
  };
}

export function setActiveTab(state: ViewState, tab: TabId): ViewState {
  return { ...state, activeTab: tab };
}

export function selectRow(state: ViewState, ref: RowRef): ViewState {
  return { ...state, selectedRow: ref };
}

/**
 * Choosing an already-active key flips its direction; a new key starts at
 * that key's natural direction (magnitudes descending, labels ascending).
 */
export function setSortKey(state: ViewState, key: SortKey): ViewState {
  const descending =
    state.sort.key === key
      ? !state.sort.descending
      : key === "abs_contribution" || key === "contribution";
  return { ...state, sort: { key, descending } };
}

export function setNameFilter(state: ViewState, name: string): ViewState {
  return { ...state, filter: { ...state.filter, name } };
}

export function toggleCategory(state: ViewState, category: string): ViewState {
  const categories = new Set(state.filter.categories);
  if (categories.has(category)) {
    categories.delete(category);
  } else {
    categories.add(category);
  }
  return { ...state, filter: { ...state.filter, categories } };
}

export function clearFilters(state: ViewState): ViewState {
  return { ...state, filter: { name: "", categories: new Set() } };
}

export function selectFeature(state: ViewState, feature: string): ViewState {
  return { ...state, selectedFeature: feature };
}

export function setComparisonSide(state: ViewState, side: "a" | "b", ref: RowRef): ViewState {
  return { ...state, comparison: { ...state.comparison, [side]: ref } };
}

export function setImportanceMethod(state: ViewState, method: ImportanceMethod): ViewState {
  return { ...state, importanceMethod: method };
}

/** Jump from a scatter point (or neighbor row) to its full explanation. */
export function drillToRow(state: ViewState, ref: RowRef): ViewState {
  return { ...state, activeTab: "explore_prediction", selectedRow: ref };
}

/** Reverse drilldown: from a model-level ranking row into the feature view. */
export function drillToFeature(state: ViewState, feature: string): ViewState {
  return { ...state, activeTab: "explore_feature", selectedFeature: feature };
}
