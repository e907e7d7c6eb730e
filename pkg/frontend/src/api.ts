// Typed fetch client for the /v1 screening service. Network failures throw
// OfflineError so callers can queue work; HTTP errors carry the service's
// {code, message, details} body.

import type {
  Advice,
  ApiErrorBody,
  BatchResponse,
  JobStatus,
  LabelResponse,
  LabelSubmission,
  MetricsResponse,
  SessionView,
} from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ApiErrorBody,
  ) {
    super(`${body.code}: ${body.message}`);
  }
}

export class OfflineError extends Error {
  constructor(cause: unknown) {
    super(`service unreachable: ${String(cause)}`);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private token: string | null = null,
    private fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["content-type"] = "application/json";
    if (this.token) headers["x-api-token"] = this.token;
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}/v1${path}`, {
        method,
        headers,
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (cause) {
      throw new OfflineError(cause);
    }
    const text = await response.text();
    const payload = text ? JSON.parse(text) : {};
    if (!response.ok) {
      throw new ApiError(response.status, payload as ApiErrorBody);
    }
    return payload as T;
  }

  project(projectId: string): Promise<SessionView> {
    return this.request("GET", `/projects/${projectId}`);
  }

  batch(projectId: string, limit: number): Promise<BatchResponse> {
    return this.request("GET", `/projects/${projectId}/batch?limit=${limit}`);
  }

  submitLabels(projectId: string, records: LabelSubmission[]): Promise<LabelResponse> {
    return this.request("POST", `/projects/${projectId}/labels`, records);
  }

  retrain(projectId: string): Promise<{ job_id: string; status: string }> {
    return this.request("POST", `/projects/${projectId}/retrain`);
  }

  job(projectId: string, jobId: string): Promise<JobStatus> {
    return this.request("GET", `/projects/${projectId}/jobs/${jobId}`);
  }

  metrics(projectId: string): Promise<MetricsResponse> {
    return this.request("GET", `/projects/${projectId}/metrics`);
  }

  advice(projectId: string): Promise<Advice> {
    return this.request("GET", `/projects/${projectId}/advice`);
  }
}
