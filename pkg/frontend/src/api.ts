import type {
  DatasetInfo,
  ExportDoc,
  RankRequest,
  RankResponse,
  ReportDoc,
  RunSummary,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over the run service. All numbers shown in the UI come
 * from these responses; the client performs no scoring of its own. */
export class Client {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.base + path, init);
    const body = await resp.json().catch(() => ({}));
    if (!resp.ok) {
      throw new ApiError(resp.status, body.code ?? "internal", body.message ?? resp.statusText);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  uploadDataset(
    file: Blob,
    fileName: string,
    meta: { target: string; sensitive: string; positive_label: string; name?: string },
  ): Promise<DatasetInfo> {
    const form = new FormData();
    form.append("file", file, fileName);
    form.append("target", meta.target);
    form.append("sensitive", meta.sensitive);
    form.append("positive_label", meta.positive_label);
    if (meta.name) form.append("name", meta.name);
    return this.request<DatasetInfo>("/datasets", { method: "POST", body: form });
  }

  createRun(body: {
    dataset_id: string;
    classifier: string;
    overrides?: Record<string, number | string>;
  }): Promise<{ run_id: string }> {
    return this.post("/runs", body);
  }

  listRuns(): Promise<{ run_ids: string[] }> {
    return this.request("/runs");
  }

  getRun(runId: string): Promise<RunSummary> {
    return this.request(`/runs/${runId}`);
  }

  getReport(runId: string): Promise<ReportDoc> {
    return this.request(`/runs/${runId}/report`);
  }

  rank(runId: string, body: RankRequest): Promise<RankResponse> {
    return this.post(`/runs/${runId}/rank`, body);
  }

  discard(runId: string, solutionIds: number[]): Promise<RunSummary> {
    return this.post(`/runs/${runId}/discard`, { solution_ids: solutionIds });
  }

  commitFinal(runId: string, solutionId: number, note: string): Promise<RunSummary> {
    return this.post(`/runs/${runId}/final`, { solution_id: solutionId, note });
  }

  exportChoice(runId: string): Promise<ExportDoc> {
    return this.request(`/runs/${runId}/export`);
  }
}
