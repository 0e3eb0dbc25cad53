/** Typed client for the risk-gap HTTP service. This is the only place the
 * UI talks to the outside world; every displayed risk number comes back
 * through here tagged with the model fingerprint. */

export interface ModelOverride {
  mu: number[];
  sigma: number[];
  rho: number[][];
}

export interface ModelResponse {
  mu: number[];
  sigma: number[];
  rho: number[][];
  alpha: number;
  fingerprint: string;
}

export interface WhatIfRequest {
  profile: number[];
  candidates: number[][];
  market_value?: number;
  alpha?: number;
  band_bps?: number;
  model_override?: ModelOverride;
}

export interface CandidateResult {
  portfolio_var_bps: number;
  discrepancy_bps: number;
  classification: string;
  var_dollars: number | null;
}

export interface WhatIfResponse {
  alpha: number;
  model_fingerprint: string;
  profile_var_bps: number;
  profile_var_dollars: number | null;
  candidates: CandidateResult[];
}

export interface MetricsRequest {
  profile: number[];
  candidates: number[][];
  metric: string;
  scale?: string;
  epsilon?: number;
  custom_penalty?: number[];
  alpha?: number;
}

export interface MetricsResponse {
  metric: string;
  model_fingerprint: string;
  values: number[];
}

export interface HealthResponse {
  status: string;
}

/** Non-2xx response, carrying the service's error text and offending field
 * (when it named one) for inline highlighting. */
export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly field: string | null = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class RiskGapClient {
  private readonly fetchImpl: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  health(): Promise<HealthResponse> {
    return this.request("GET", "/health");
  }

  model(): Promise<ModelResponse> {
    return this.request("GET", "/model");
  }

  whatif(body: WhatIfRequest): Promise<WhatIfResponse> {
    return this.request("POST", "/whatif", body);
  }

  metrics(body: MetricsRequest): Promise<MetricsResponse> {
    return this.request("POST", "/metrics", body);
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = {
      method,
      headers: { "content-type": "application/json" },
    };
    if (body !== undefined) init.body = JSON.stringify(body);
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      let message = `HTTP ${response.status}`;
      let field: string | null = null;
      try {
        const parsed = (await response.json()) as {
          error?: string;
          field?: string | null;
          detail?: string;
        };
        if (parsed.error) message = parsed.error;
        else if (parsed.detail) message = parsed.detail;
        field = parsed.field ?? null;
      } catch {
        // non-JSON error body: keep the status text
      }
      throw new ApiError(message, response.status, field);
    }
    return (await response.json()) as T;
  }
}
