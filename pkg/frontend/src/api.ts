/** Typed client for the simulator service. All model math happens server-side;
 * this module only ships scenario bodies out and typed responses back. */

export interface DilocoBody {
  h: number;
  compression: number;
  mode: "flat" | "hierarchical" | "pipeline";
  stages: number;
}

export interface NetworkBody {
  bandwidth_up_mbps: number;
  bandwidth_down_mbps: number;
  rtt_ms: number;
}

export interface SimulateBody {
  node: { preset: string };
  n_nodes: number;
  diloco: DilocoBody;
  network: NetworkBody;
  duration_days: number;
  mfu: number;
  model_params: number | "auto";
  scenario: "optimistic" | "expected" | "conservative";
  tokens_per_step: number;
  regime: string;
}

export interface EtaBreakdown {
  eta_h: number;
  eta_comp: number;
  eta_rep: number;
  eta_act: number;
  eta: number;
}

export interface TrafficOut {
  payload_bytes: number;
  sync_wall_time_s: number;
  required_bandwidth_bps: number;
  average_traffic_bps: number;
  compute_bound: boolean;
  slowdown: number;
}

export interface ComplianceOut {
  regime: string;
  node_registrable: boolean;
  binding_rule: string | null;
  model_violations: { label: string; threshold_flop: string; exceeded_by_quality: boolean }[];
  narrative: string;
}

export interface SimulateResponse {
  target: string;
  node_config: string;
  nodes: number;
  mode: string;
  model_params: number;
  h: number;
  eta: number;
  c_local: string; // decimal strings: the service owns the precision
  c_quality: string;
  c_throughput: string;
  d_tokens: string;
  chi: number;
  ot: number;
  cost: number | null;
  traffic_mbps: number;
  compute_bound: boolean;
  eta_breakdown: EtaBreakdown;
  traffic: TrafficOut;
  replicas: number;
  expected_failures: number;
  warnings: string[];
  compliance?: ComplianceOut;
}

export interface CatalogPreset {
  name: string;
  chips: number;
  flops16_tflops: number;
  flops8_tflops: number | null;
  hbm_gb: number;
  price_usd_per_chip: number | null;
  h100_equivalents: number;
  max_model_params: number;
}

export interface RegimeOut {
  name: string;
  node_compute_threshold: number | null;
  node_memory_threshold: number | null;
  model_flop_thresholds: { label: string; flop: string }[];
  notes: string;
}

export interface OptimizeBody {
  target_metric: "c_local" | "c_quality";
  target_value: number;
  regime: string;
  network: NetworkBody;
  duration_days: number;
  scenario: "optimistic" | "expected" | "conservative";
}

/** /optimize returns the winning configuration's metrics row plus the
 * constraints that bind at the optimum. */
export interface OptimizeResponse extends SimulateResponse {
  binding_constraints: string[];
}

export interface ServiceDefaults {
  preset: string;
  n_nodes: number;
  h: number;
  compression: number;
  duration_days: number;
  mfu: number;
  tokens_per_step: number;
  bandwidth_mbps: number;
  rtt_ms: number;
  scenario: string;
  regime: string;
}

/** Raised for 4xx responses; detail carries the service's diagnostics. */
export class ServiceError extends Error {
  constructor(
    public status: number,
    public detail: { error: string; constraint?: string; fields?: { loc: string; msg: string }[] },
  ) {
    super(detail.error);
  }
}

export class ApiClient {
  constructor(
    public baseUrl: string = "http://127.0.0.1:8351",
    private fetchFn: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const body = await resp.json();
    if (!resp.ok) {
      throw new ServiceError(resp.status, body);
    }
    return body as T;
  }

  simulate(body: SimulateBody, signal?: AbortSignal): Promise<SimulateResponse> {
    return this.request<SimulateResponse>("/simulate", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
  }

  optimize(body: OptimizeBody, signal?: AbortSignal): Promise<OptimizeResponse> {
    return this.request<OptimizeResponse>("/optimize", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
  }

  catalog(): Promise<{ presets: CatalogPreset[] }> {
    return this.request("/catalog");
  }

  regimes(): Promise<{ regimes: RegimeOut[] }> {
    return this.request("/regimes");
  }

  defaults(): Promise<ServiceDefaults> {
    return this.request("/defaults");
  }
}
