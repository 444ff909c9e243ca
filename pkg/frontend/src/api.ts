/**
 * Typed client for the listening-test HTTP API.
 *
 * Network failures (fetch rejections) are retried with exponential
 * backoff; HTTP error statuses are not retried -- a 404 on /tasks/next
 * means the session is complete, anything else is a caller bug.
 */

import type {
  RaterMeta,
  RatingSubmission,
  SubmitAck,
  TaskView,
} from "./types.js";

/** The service has nothing left for this rater. */
export class NoEligibleTaskError extends Error {
  constructor() {
    super("no eligible task for this rater");
  }
}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export interface RetryOptions {
  attempts?: number;
  baseDelayMs?: number;
  sleep?: (ms: number) => Promise<void>;
  onRetry?: (attempt: number) => void;
}

const defaultSleep = (ms: number) =>
  new Promise<void>((resolve) => setTimeout(resolve, ms));

/**
 * Run an operation, retrying only transport-level failures.
 * Delay doubles per attempt: base, 2*base, 4*base, ...
 */
export async function withRetry<T>(
  op: () => Promise<T>,
  options: RetryOptions = {},
): Promise<T> {
  const attempts = options.attempts ?? 4;
  const base = options.baseDelayMs ?? 250;
  const sleep = options.sleep ?? defaultSleep;
  let lastError: unknown;
  for (let attempt = 0; attempt < attempts; attempt++) {
    if (attempt > 0) {
      options.onRetry?.(attempt);
      await sleep(base * 2 ** (attempt - 1));
    }
    try {
      return await op();
    } catch (err) {
      if (err instanceof NoEligibleTaskError || err instanceof ApiError) {
        throw err;
      }
      lastError = err;
    }
  }
  throw lastError;
}

async function detailOf(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: string };
    return body.detail ?? response.statusText;
  } catch {
    return response.statusText;
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: typeof fetch = fetch,
  ) {}

  async nextTask(raterId: string, meta: RaterMeta): Promise<TaskView> {
    const params = new URLSearchParams({
      rater: raterId,
      country: meta.country,
      accent: meta.accent,
      gender: meta.gender,
    });
    const response = await this.fetchFn(
      `${this.baseUrl}/api/tasks/next?${params}`,
    );
    if (response.status === 404) {
      throw new NoEligibleTaskError();
    }
    if (!response.ok) {
      throw new ApiError(response.status, await detailOf(response));
    }
    return (await response.json()) as TaskView;
  }

  async submitRating(submission: RatingSubmission): Promise<SubmitAck> {
    const response = await this.fetchFn(`${this.baseUrl}/api/ratings`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(submission),
    });
    if (!response.ok) {
      throw new ApiError(response.status, await detailOf(response));
    }
    return (await response.json()) as SubmitAck;
  }

  async results(groupBy: string): Promise<unknown> {
    const response = await this.fetchFn(
      `${this.baseUrl}/api/results?group_by=${encodeURIComponent(groupBy)}`,
    );
    if (!response.ok) {
      throw new ApiError(response.status, await detailOf(response));
    }
    return response.json();
  }

  audioUrl(utteranceId: string): string {
    return `${this.baseUrl}/api/audio/${encodeURIComponent(utteranceId)}`;
  }
}
