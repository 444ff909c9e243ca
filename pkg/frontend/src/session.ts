/**
 * The rating loop: fetch a task, collect an answer, submit, repeat.
 *
 * The loop is presenter-agnostic so the same engine drives both the
 * browser UI (DOM presenter) and scripted sessions in tests. Server
 * acknowledgment gates advancement: a task only counts as completed
 * once the service has accepted its event. Network failures retry with
 * backoff while the progress callback shows an offline state.
 */

import { NoEligibleTaskError, withRetry } from "./api.js";
import type {
  RaterMeta,
  RatingSubmission,
  SubmitAck,
  TaskAnswer,
  TaskView,
} from "./types.js";

/** The slice of the API the session loop needs (ApiClient satisfies it). */
export interface TaskApi {
  nextTask(raterId: string, meta: RaterMeta): Promise<TaskView>;
  submitRating(submission: RatingSubmission): Promise<SubmitAck>;
}

export interface TaskPresenter {
  /** Show one task and resolve with the rater's answer. */
  present(task: TaskView): Promise<TaskAnswer>;
  /** Called once when no eligible task remains. */
  sessionComplete(completed: number): void;
}

export interface SessionOptions {
  maxTasks?: number;
  onProgress?: (completed: number, offline: boolean) => void;
  sleep?: (ms: number) => Promise<void>;
}

/** Run the loop until the pool is exhausted; returns tasks completed. */
export async function runSession(
  api: TaskApi,
  raterId: string,
  meta: RaterMeta,
  presenter: TaskPresenter,
  options: SessionOptions = {},
): Promise<number> {
  const maxTasks = options.maxTasks ?? Number.POSITIVE_INFINITY;
  let completed = 0;
  options.onProgress?.(completed, false);
  while (completed < maxTasks) {
    let task: TaskView;
    try {
      task = await withRetry(() => api.nextTask(raterId, meta), {
        sleep: options.sleep,
        onRetry: () => options.onProgress?.(completed, true),
      });
    } catch (err) {
      if (err instanceof NoEligibleTaskError) {
        break;
      }
      throw err;
    }
    options.onProgress?.(completed, false);
    const answer = await presenter.present(task);
    const ack = await withRetry(
      () =>
        api.submitRating({
          task_id: task.task_id,
          rater_id: raterId,
          rater_meta: meta,
          ...(answer.values !== undefined && { values: answer.values }),
          ...(answer.chosenSide !== undefined && {
            chosen_side: answer.chosenSide,
          }),
        }),
      {
        sleep: options.sleep,
        onRetry: () => options.onProgress?.(completed, true),
      },
    );
    if (ack.status !== "accepted") {
      throw new Error(`submission not accepted: ${JSON.stringify(ack)}`);
    }
    completed += 1;
    options.onProgress?.(completed, false);
  }
  presenter.sessionComplete(completed);
  return completed;
}
