import { ApiClient, ApiError, type RowRef } from "./api";
import { DEFAULT_FLAGS, type FeatureFlags } from "./flags";
import { RequestGate } from "./requests";
import {
  initialViewState,
  selectFeature,
  selectRow,
  setActiveTab,
  setComparisonSide,
  setImportanceMethod,
  setNameFilter,
  setSortKey,
  toggleCategory,
  drillToFeature,
  drillToRow,
  type ImportanceMethod,
  type SortKey,
  type TabId,
  type ViewState,
} from "./state";
import type {
  CompareResponse,
  ContributionsResponse,
  DistributionResponse,
  EntitiesResponse,
  FeaturesResponse,
  ImportanceResponse,
  RowsResponse,
  ScatterResponse,
  SimilarResponse,
} from "./types";

export type Loadable<T> =
  | { status: "idle" }
  | { status: "loading" }
  | { status: "ready"; data: T }
  | { status: "error"; message: string };

const IDLE = { status: "idle" } as const;

export interface FeatureDetail {
  scatter: ScatterResponse;
  distribution: DistributionResponse;
}

export type SlotName =
  | "entities"
  | "features"
  | "rows"
  | "contributions"
  | "similar"
  | "compare"
  | "importance"
  | "feature";

export interface AppData {
  entities: Loadable<EntitiesResponse>;
  features: Loadable<FeaturesResponse>;
  rows: Loadable<RowsResponse>;
  contributions: Loadable<ContributionsResponse>;
  similar: Loadable<SimilarResponse>;
  compare: Loadable<CompareResponse>;
  importance: Loadable<ImportanceResponse>;
  feature: Loadable<FeatureDetail>;
}

export const NEIGHBOR_COUNT = 5;

/**
 * Owns the view state and every data slot. Views call the intent methods;
 * all server data flows through `load`, which applies last-write-wins via
 * the request gate so stale responses are dropped, never rendered.
 */
export class AppController {
  state: ViewState = initialViewState();
  data: AppData = {
    entities: IDLE,
    features: IDLE,
    rows: IDLE,
    contributions: IDLE,
    similar: IDLE,
    compare: IDLE,
    importance: IDLE,
    feature: IDLE,
  };

  private readonly gate = new RequestGate();
  private readonly retries = new Map<SlotName, () => Promise<void>>();
  private readonly listeners = new Set<() => void>();

  constructor(
    private readonly api: ApiClient,
    readonly flags: FeatureFlags = DEFAULT_FLAGS,
  ) {}

  subscribe(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }

  private async load<T>(
    slot: SlotName,
    task: () => Promise<T>,
    assign: (value: Loadable<T>) => void,
  ): Promise<void> {
    const run = async () => {
      const token = this.gate.begin(slot);
      assign({ status: "loading" });
      this.emit();
      let next: Loadable<T>;
      try {
        next = { status: "ready", data: await task() };
      } catch (error) {
        const message =
          error instanceof ApiError
            ? error.message
            : error instanceof Error
              ? error.message
              : "request failed";
        next = { status: "error", message };
      }
      if (!this.gate.isCurrent(slot, token)) {
        return;
      }
      assign(next);
      this.emit();
    };
    this.retries.set(slot, run);
    await run();
  }

  /** Re-run the most recent load for a slot; wired to the error state's button. */
  retry(slot: SlotName): Promise<void> {
    const run = this.retries.get(slot);
    return run ? run() : Promise.resolve();
  }

  /** Load catalog and fleet, select the first reading, fill the first tab. */
  async boot(): Promise<void> {
    await Promise.all([
      this.load("features", () => this.api.features(), (v) => (this.data.features = v)),
      this.load("entities", () => this.api.entities(), (v) => (this.data.entities = v)),
    ]);
    const entities = this.data.entities;
    if (entities.status !== "ready" || entities.data.entities.length === 0) {
      return;
    }
    const first = entities.data.entities[0]!;
    await this.selectEntity(first);
  }

  async selectEntity(entityId: string): Promise<void> {
    await this.load("rows", () => this.api.rows(entityId), (v) => (this.data.rows = v));
    const rows = this.data.rows;
    if (rows.status === "ready" && rows.data.rows.length > 0) {
      await this.openRow({ entity_id: entityId, row_id: rows.data.rows[0]!.row_id });
    }
  }

  /** Select a reading and refresh whatever the active tab shows about it. */
  async openRow(ref: RowRef): Promise<void> {
    this.state = selectRow(this.state, ref);
    this.emit();
    await this.loadActiveTab();
  }

  async setTab(tab: TabId): Promise<void> {
    this.state = setActiveTab(this.state, tab);
    this.emit();
    await this.loadActiveTab();
  }

  /** Fetch only what the visible tab needs; other slots keep their data. */
  async loadActiveTab(): Promise<void> {
    const ref = this.state.selectedRow;
    switch (this.state.activeTab) {
      case "explore_prediction": {
        if (ref) {
          await this.load(
            "contributions",
            () => this.api.contributions(ref),
            (v) => (this.data.contributions = v),
          );
        }
        return;
      }
      case "similar_turbines": {
        if (ref) {
          await this.load(
            "similar",
            () => this.api.similar(ref, NEIGHBOR_COUNT),
            (v) => (this.data.similar = v),
          );
        }
        return;
      }
      case "compare": {
        await this.loadComparison();
        return;
      }
      case "understand_model": {
        await this.loadImportance();
        return;
      }
      case "explore_feature": {
        await this.loadFeatureDetail();
        return;
      }
    }
  }

  private async loadComparison(): Promise<void> {
    const { a, b } = this.state.comparison;
    if (!a || !b) {
      return;
    }
    await this.load(
      "compare",
      () => this.api.compare(a, b),
      (v) => (this.data.compare = v),
    );
  }

  private async loadImportance(): Promise<void> {
    const method = this.state.importanceMethod;
    await this.load(
      "importance",
      () => this.api.importance(method),
      (v) => (this.data.importance = v),
    );
  }

  private async loadFeatureDetail(): Promise<void> {
    const feature = this.state.selectedFeature;
    if (!feature) {
      return;
    }
    await this.load(
      "feature",
      async () => {
        const [scatter, distribution] = await Promise.all([
          this.api.scatter(feature),
          this.api.distribution(feature),
        ]);
        return { scatter, distribution };
      },
      (v) => (this.data.feature = v),
    );
  }

  async setCompareSide(side: "a" | "b", ref: RowRef): Promise<void> {
    this.state = setComparisonSide(this.state, side, ref);
    this.emit();
    await this.loadComparison();
  }

  async setMethod(method: ImportanceMethod): Promise<void> {
    this.state = setImportanceMethod(this.state, method);
    this.emit();
    await this.loadImportance();
  }

  async pickFeature(feature: string): Promise<void> {
    this.state = selectFeature(this.state, feature);
    this.emit();
    await this.loadFeatureDetail();
  }

  /** Scatter or neighbor click: jump to the explanation of that reading. */
  async drillToRow(ref: RowRef): Promise<void> {
    this.state = drillToRow(this.state, ref);
    this.emit();
    await this.loadActiveTab();
  }

  /** Importance row click; only reachable when the flag is on. */
  async drillToFeature(feature: string): Promise<void> {
    if (!this.flags.reverseDrilldown) {
      return;
    }
    this.state = drillToFeature(this.state, feature);
    this.emit();
    await this.loadFeatureDetail();
  }

  setSort(key: SortKey): void {
    this.state = setSortKey(this.state, key);
    this.emit();
  }

  setNameFilter(name: string): void {
    this.state = setNameFilter(this.state, name);
    this.emit();
  }

  toggleCategory(category: string): void {
    this.state = toggleCategory(this.state, category);
    this.emit();
  }
}
