import type {
  CompareResponse,
  ContributionsResponse,
  DistributionResponse,
  EntitiesResponse,
  FeaturesResponse,
  ImportanceMethod,
  ImportanceResponse,
  PredictResponse,
  RowsResponse,
  ScatterResponse,
  SimilarResponse,
} from "./types";

/** Non-2xx response; carries the server's error body when it sent one. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly field?: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface RowRef {
  entity_id: string;
  row_id: number;
}

/**
 * Thin typed client over the REST interface. All data the UI shows comes
 * through here; the UI itself never computes scores, deltas, or quantiles.
 */
export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: "GET" | "POST", path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.base + path, {
        method,
        headers: body === undefined ? undefined : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (cause) {
      throw new ApiError(0, cause instanceof Error ? cause.message : "network error");
    }
    const payload = await response.json().catch(() => undefined);
    if (!response.ok) {
      const message =
        payload && typeof payload.error === "string"
          ? payload.error
          : `request failed with status ${response.status}`;
      throw new ApiError(response.status, message, payload?.field);
    }
    return payload as T;
  }

  entities(): Promise<EntitiesResponse> {
    return this.request("GET", "/api/v1/entities");
  }

  rows(entityId: string): Promise<RowsResponse> {
    return this.request("GET", `/api/v1/entities/${encodeURIComponent(entityId)}/rows`);
  }

  features(): Promise<FeaturesResponse> {
    return this.request("GET", "/api/v1/features");
  }

  predict(ref: RowRef): Promise<PredictResponse> {
    return this.request("POST", "/api/v1/predict", ref);
  }

  contributions(ref: RowRef): Promise<ContributionsResponse> {
    return this.request("POST", "/api/v1/contributions", ref);
  }

  similar(ref: RowRef, k: number): Promise<SimilarResponse> {
    return this.request("POST", "/api/v1/similar", { ...ref, k });
  }

  compare(a: RowRef, b: RowRef): Promise<CompareResponse> {
    return this.request("POST", "/api/v1/compare", {
      entity_id_a: a.entity_id,
      row_id_a: a.row_id,
      entity_id_b: b.entity_id,
      row_id_b: b.row_id,
    });
  }

  importance(method: ImportanceMethod): Promise<ImportanceResponse> {
    return this.request("GET", `/api/v1/importance?method=${method}`);
  }

  scatter(feature: string): Promise<ScatterResponse> {
    return this.request("GET", `/api/v1/feature/${encodeURIComponent(feature)}/scatter`);
  }

  distribution(feature: string): Promise<DistributionResponse> {
    return this.request("GET", `/api/v1/feature/${encodeURIComponent(feature)}/distribution`);
  }
}
