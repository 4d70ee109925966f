/** Wire types for the brakewatch REST API (response bodies as served). */

export interface MachineFeature {
  name: string;
  display_name: string;
  category: string;
  type: "numeric" | "boolean" | "categorical";
  unit: string | null;
}

/** Interpretable entries always carry members; length > 1 marks a fold group. */
export interface InterpretableFeature extends MachineFeature {
  members: string[];
}

export interface FeaturesResponse {
  features: MachineFeature[];
  interpretable: InterpretableFeature[];
}

export interface EntitiesResponse {
  entities: string[];
}

export interface RowSummary {
  row_id: number;
  label: number | null;
  values: Record<string, string>;
}

export interface RowsResponse {
  entity_id: string;
  rows: RowSummary[];
}

export interface PredictResponse {
  entity_id: string;
  row_id: number;
  label: number | null;
  margin: number;
  probability: number;
}

export interface ContributionsResponse extends PredictResponse {
  base_value: number;
  contributions: Record<string, number>;
  values: Record<string, string>;
}

export interface Neighbor {
  entity_id: string;
  row_id: number;
  distance: number;
  label: number | null;
}

export interface SimilarResponse {
  neighbors: Neighbor[];
}

export interface CompareSide {
  entity_id: string;
  row_id: number;
  margin: number;
  probability: number;
}

export interface CompareRecord {
  feature: string;
  value_a: string;
  value_b: string;
  contribution_a: number;
  contribution_b: number;
  delta_contribution: number;
}

export interface CompareResponse {
  row_a: CompareSide;
  row_b: CompareSide;
  features: CompareRecord[];
}

export type ImportanceMethod = "gain" | "mean_abs_shap" | "signed_mean_shap";

export interface ImportanceResponse {
  method: ImportanceMethod;
  normalized: boolean;
  scores: Record<string, number>;
}

export interface ScatterPoint {
  entity_id: string;
  row_id: number;
  value: number | null;
  contribution: number;
  probability: number;
}

export interface ScatterResponse {
  feature: string;
  points: ScatterPoint[];
}

export interface DistributionResponse {
  feature: string;
  minimum: number;
  q1: number;
  median: number;
  q3: number;
  maximum: number;
  count: number;
}

export interface ApiErrorBody {
  error: string;
  field?: string;
  entity_id?: string;
  row_id?: number;
}
