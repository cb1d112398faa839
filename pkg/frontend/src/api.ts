/**
 * Typed client for the pdflow review server JSON API.
 *
 * The UI performs no classification or aggregation of its own: every number
 * on screen comes from these endpoints.
 */

export interface FlowRow {
  id: string;
  path: string;
  source: string;
  sink: string;
  sink_type: string;
  instance: string;
  confidence: string;
  span: number[];
  verdict: string;
}

export interface FindingsGroup {
  key: string | null;
  rows: FlowRow[];
}

export interface FindingsPage {
  total: number;
  page: number;
  page_size: number;
  group_by: string;
  groups: FindingsGroup[];
}

export interface TypeVariant {
  name: string;
  count: number;
}

export interface TypeStem {
  name: string;
  count: number;
  variants: TypeVariant[];
}

export interface TypeCategory {
  category: string;
  count: number;
  stems: TypeStem[];
}

export interface TypeTree {
  total: number;
  categories: TypeCategory[];
}

export interface Heatmap {
  sources: string[];
  sinks: string[];
  matrix: number[][];
  row_totals: number[];
  col_totals: number[];
  total: number;
}

export interface Ropa {
  categories_of_personal_data: string[];
  categories_of_processing: Record<string, string[]>;
  database_or_third_party_transfers: Record<string, number>;
  encryption_or_anonymization: Record<string, number>;
  logging: Record<string, number>;
}

export interface MetricsCell {
  tp: number;
  fp: number;
  suppressed: boolean;
  precision: number | null;
  rendered: string;
}

export interface Metrics {
  threshold: number;
  reviewed: number;
  total: number;
  coverage: number;
  sources: string[];
  sinks: string[];
  cells: MetricsCell[][];
}

export interface Snippet {
  id: string;
  path: string;
  rule: string;
  source: string;
  sink: string;
  instance: string;
  span: number[];
  first_line: number;
  lines: string[];
}

export type Verdict = "TP" | "FP" | "Unreviewed";

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

export interface FindingsQuery {
  groupBy?: string;
  filters?: string[]; // "key:value" entries
  page?: number;
  pageSize?: number;
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  private async getJson<T>(path: string): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.base + path);
    } catch (err) {
      throw new ApiError(`server unreachable: ${String(err)}`, 0);
    }
    if (!response.ok) {
      throw new ApiError(`GET ${path} failed (${response.status})`, response.status);
    }
    return (await response.json()) as T;
  }

  findings(query: FindingsQuery = {}): Promise<FindingsPage> {
    const params = new URLSearchParams();
    if (query.groupBy && query.groupBy !== "none") params.set("group_by", query.groupBy);
    for (const filter of query.filters ?? []) params.append("filter", filter);
    if (query.page) params.set("page", String(query.page));
    if (query.pageSize) params.set("page_size", String(query.pageSize));
    const suffix = params.toString() ? `?${params.toString()}` : "";
    return this.getJson<FindingsPage>(`/api/findings${suffix}`);
  }

  types(): Promise<TypeTree> {
    return this.getJson<TypeTree>("/api/views/types");
  }

  heatmap(): Promise<Heatmap> {
    return this.getJson<Heatmap>("/api/views/heatmap");
  }

  ropa(): Promise<Ropa> {
    return this.getJson<Ropa>("/api/ropa");
  }

  metrics(): Promise<Metrics> {
    return this.getJson<Metrics>("/api/metrics");
  }

  snippet(id: string, context = 4): Promise<Snippet> {
    return this.getJson<Snippet>(`/api/snippet/${encodeURIComponent(id)}?context=${context}`);
  }

  async label(findingId: string, verdict: Verdict, note?: string): Promise<void> {
    let response: Response;
    try {
      response = await fetch(`${this.base}/api/labels`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ finding_id: findingId, verdict, note: note || null }),
      });
    } catch (err) {
      throw new ApiError(`server unreachable: ${String(err)}`, 0);
    }
    if (!response.ok) {
      throw new ApiError(`label write failed (${response.status})`, response.status);
    }
  }
}
