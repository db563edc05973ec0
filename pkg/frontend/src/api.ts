/** Typed client for the /v1 endpoints.  The UI never computes scores
 * itself; every displayed number comes back from these calls. */

import type { Prediction, ScoreResult, TrialDetail, TrialSummary } from "./types";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function asJson<T>(res: Response): Promise<T> {
  if (!res.ok) {
    let detail = res.statusText;
    try {
      const body = (await res.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      /* non-JSON error body: keep the status text */
    }
    throw new ApiError(res.status, detail);
  }
  return (await res.json()) as T;
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl}/v1${path}`;
  }

  async listTrials(): Promise<TrialSummary[]> {
    const body = await asJson<{ trials: TrialSummary[] }>(
      await fetch(this.url("/trials")),
    );
    return body.trials;
  }

  getTrial(id: number): Promise<TrialDetail> {
    return fetch(this.url(`/trials/${id}`)).then((r) => asJson<TrialDetail>(r));
  }

  async submitResponse(
    id: number,
    assignment: boolean[],
    session?: string,
  ): Promise<ScoreResult> {
    const res = await fetch(this.url(`/trials/${id}/response`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ assignment, session: session ?? null }),
    });
    return asJson<ScoreResult>(res);
  }

  getPrediction(id: number, seed = 0): Promise<Prediction> {
    return fetch(this.url(`/trials/${id}/prediction?seed=${seed}`)).then((r) =>
      asJson<Prediction>(r),
    );
  }

  async openSession(): Promise<string> {
    const res = await fetch(this.url("/sessions"), { method: "POST" });
    return (await asJson<{ token: string }>(res)).token;
  }
}
