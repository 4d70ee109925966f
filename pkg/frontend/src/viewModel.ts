import { MISSING_TOKEN, formatScore } from "./format";
import type { FeatureRow } from "./tableOps";
import type {
  CompareRecord,
  CompareResponse,
  ContributionsResponse,
  FeaturesResponse,
  ImportanceResponse,
  InterpretableFeature,
} from "./types";

/** Catalog lookup for the interpretable space the API explains in. */
export function catalogIndex(features: FeaturesResponse): Map<string, InterpretableFeature> {
  return new Map(features.interpretable.map((f) => [f.name, f]));
}

export function categoriesOf(features: FeaturesResponse): string[] {
  const seen: string[] = [];
  for (const f of features.interpretable) {
    if (!seen.includes(f.category)) {
      seen.push(f.category);
    }
  }
  return seen;
}

/** Features the scatter/distribution views accept: scalar numeric columns. */
export function scalarFeatures(features: FeaturesResponse): InterpretableFeature[] {
  return features.interpretable.filter((f) => f.members.length <= 1 && f.type === "numeric");
}

function describe(
  name: string,
  catalog: Map<string, InterpretableFeature>,
): { displayName: string; category: string } {
  const entry = catalog.get(name);
  return entry
    ? { displayName: entry.display_name, category: entry.category }
    : { displayName: name, category: "" };
}

/** Explanation table rows; values and contributions are served, not derived. */
export function contributionRows(
  response: ContributionsResponse,
  catalog: Map<string, InterpretableFeature>,
): FeatureRow[] {
  return Object.entries(response.contributions).map(([name, contribution]) => ({
    name,
    ...describe(name, catalog),
    value: response.values[name] ?? MISSING_TOKEN,
    contribution,
  }));
}

export interface CompareRow extends FeatureRow {
  record: CompareRecord;
}

/** Comparison rows sort and filter on the served delta, never a recomputed one. */
export function compareTableRows(
  response: CompareResponse,
  catalog: Map<string, InterpretableFeature>,
): CompareRow[] {
  return response.features.map((record) => ({
    name: record.feature,
    ...describe(record.feature, catalog),
    value: record.value_a,
    contribution: record.delta_contribution,
    record,
  }));
}

/** Model-level ranking rows; score doubles as the sortable contribution. */
export function importanceRows(
  response: ImportanceResponse,
  catalog: Map<string, InterpretableFeature>,
): FeatureRow[] {
  return Object.entries(response.scores).map(([name, score]) => ({
    name,
    ...describe(name, catalog),
    value: formatScore(score),
    contribution: score,
  }));
}
