/**
 * Wire types mirroring the listening-test service's JSON API.
 * Task payloads never carry model identity; the blind test depends on it.
 */

export type TaskKind = "mos" | "accent_match" | "preference";

export type ServiceSide = "left" | "right";

export interface TaskReference {
  country: string;
  accent: string;
  gender: string;
}

export interface TaskView {
  task_id: string;
  kind: TaskKind;
  utterances: string[];
  dimensions: string[];
  reference: TaskReference;
  text: string;
}

export interface RaterMeta {
  country: string;
  accent: string;
  gender: string;
}

export interface RatingSubmission {
  task_id: string;
  rater_id: string;
  rater_meta: RaterMeta;
  values?: Record<string, number>;
  chosen_side?: ServiceSide;
}

export interface SubmitAck {
  status: string;
  replaced: boolean;
}

/** What a presenter hands back once the rater has answered one task. */
export interface TaskAnswer {
  values?: Record<string, number>;
  chosenSide?: ServiceSide;
}
