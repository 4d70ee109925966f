import type { FilterState, SortState } from "./state";

/** One row of an explanation table, assembled from API responses verbatim. */
export interface FeatureRow {
  name: string;
  displayName: string;
  category: string;
  /** Display string as served, including the missing-value token. */
  value: string;
  contribution: number;
}

function compareBy(sort: SortState, a: FeatureRow, b: FeatureRow): number {
  switch (sort.key) {
    case "abs_contribution": {
      return Math.abs(a.contribution) - Math.abs(b.contribution);
    }
    case "contribution": {
      return a.contribution - b.contribution;
    }
    case "name": {
      return a.displayName.localeCompare(b.displayName);
    }
    case "category": {
      const byCategory = a.category.localeCompare(b.category);
      return byCategory !== 0 ? byCategory : a.displayName.localeCompare(b.displayName);
    }
  }
}

/** Pure: returns a new array, stable for equal keys, input untouched. */
export function sortRows(rows: readonly FeatureRow[], sort: SortState): FeatureRow[] {
  const decorated = rows.map((row, index) => ({ row, index }));
  decorated.sort((a, b) => {
    const order = compareBy(sort, a.row, b.row);
    if (order !== 0) {
      return sort.descending ? -order : order;
    }
    return a.index - b.index;
  });
  return decorated.map((d) => d.row);
}

/**
 * Pure, conjunctive: a row survives only if its name matches the substring
 * (case-insensitive, against display and machine name) AND its category is
 * in the selected set (empty set keeps every category).
 */
export function filterRows(rows: readonly FeatureRow[], filter: FilterState): FeatureRow[] {
  const needle = filter.name.trim().toLowerCase();
  return rows.filter((row) => {
    if (needle !== "" &&
        !row.displayName.toLowerCase().includes(needle) &&
        !row.name.toLowerCase().includes(needle)) {
      return false;
    }
    if (filter.categories.size > 0 && !filter.categories.has(row.category)) {
      return false;
    }
    return true;
  });
}

export function applyTableOps(
  rows: readonly FeatureRow[],
  filter: FilterState,
  sort: SortState,
): FeatureRow[] {
  return sortRows(filterRows(rows, filter), sort);
}
