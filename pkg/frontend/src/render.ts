/**
 * DOM rendering for rating tasks.
 *
 * Blind-test integrity rules enforced here:
 *  - only whitelisted task fields reach the DOM (utterance ids are used
 *    for audio URLs and element keys, never the raw payload);
 *  - preference pairs render as anonymous players "A" and "B" whose
 *    left/right placement is randomized per render to cancel position
 *    bias, and the choice is mapped back to the service's sides;
 *  - the submit button stays disabled until every player has been
 *    played through and the form is complete.
 */

import type { PlayerFactory } from "./player.js";
import { PlaybackGate } from "./player.js";
import type { ServiceSide, TaskAnswer, TaskView } from "./types.js";

const LIKERT_VALUES = [1, 2, 3, 4, 5] as const;

const DIMENSION_LABELS: Record<string, string> = {
  overall: "Overall quality",
  naturalness: "Naturalness",
  accentedness: "Accentedness",
  accent_match: "Accent match",
  country_match: "Country match",
  gender_match: "Gender match",
};

export interface RenderedTask {
  /** Resolves with the rater's validated answer on submit. */
  answer: Promise<TaskAnswer>;
  gate: PlaybackGate;
}

export interface RenderOptions {
  playerFactory: PlayerFactory;
  audioUrl: (utteranceId: string) => string;
  /** Randomness source for A/B placement; injectable for tests. */
  random?: () => number;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function likertRow(
  dimension: string,
  onChange: () => void,
): { row: HTMLElement; value: () => number | null } {
  const row = el("div", "likert-row");
  row.append(el("span", "likert-label",
    DIMENSION_LABELS[dimension] ?? dimension));
  const group = el("div", "likert-options");
  const name = `likert-${dimension}`;
  for (const value of LIKERT_VALUES) {
    const label = el("label", "likert-option");
    const input = el("input");
    input.type = "radio";
    input.name = name;
    input.value = String(value);
    input.addEventListener("change", onChange);
    label.append(input, document.createTextNode(String(value)));
    group.append(label);
  }
  row.append(group);
  return {
    row,
    value: () => {
      const checked = row.querySelector<HTMLInputElement>("input:checked");
      return checked ? Number.parseInt(checked.value, 10) : null;
    },
  };
}

/** Render one task into the container; resolves on a valid submission. */
export function renderTask(
  container: HTMLElement,
  task: TaskView,
  options: RenderOptions,
): RenderedTask {
  container.replaceChildren();
  const random = options.random ?? Math.random;
  const gate = new PlaybackGate(task.utterances);

  const form = el("form", "task");
  const heading = task.kind === "preference"
    ? "Which of the two recordings sounds more natural?"
    : "Listen to the recording, then rate it.";
  form.append(el("h2", "task-heading", heading));
  if (task.text) {
    form.append(el("p", "task-text", task.text));
  }
  if (task.kind === "accent_match") {
    const ref = task.reference;
    form.append(el("p", "task-reference",
      `Reference: ${ref.accent} accent, ${ref.country}, ${ref.gender}`));
  }

  const submit = el("button", "submit", "Submit rating");
  submit.type = "submit";
  submit.disabled = true;
  const hint = el("p", "gate-hint",
    "Play every recording to the end to enable submission.");

  let formComplete: () => boolean;
  let collect: () => TaskAnswer;

  const refreshGate = () => {
    submit.disabled = !(gate.open && formComplete());
    hint.hidden = gate.open;
  };

  const addPlayer = (utteranceId: string, caption: string) => {
    const wrap = el("div", "player");
    wrap.append(el("span", "player-caption", caption));
    const player = options.playerFactory(options.audioUrl(utteranceId));
    player.onEnded(() => {
      gate.markEnded(utteranceId);
      refreshGate();
    });
    wrap.append(player.element);
    form.append(wrap);
    return wrap;
  };

  if (task.kind === "preference") {
    // Display order is shuffled; slots map back to the service's sides.
    const serviceSides: ServiceSide[] = ["left", "right"];
    const order = random() < 0.5 ? [0, 1] : [1, 0];
    const slotToSide: ServiceSide[] = [];
    order.forEach((utteranceIndex, slot) => {
      addPlayer(task.utterances[utteranceIndex], slot === 0 ? "A" : "B");
      slotToSide.push(serviceSides[utteranceIndex]);
    });
    const choice = el("div", "preference-choice");
    for (const [slot, caption] of [[0, "A"], [1, "B"]] as const) {
      const label = el("label", "preference-option");
      const input = el("input");
      input.type = "radio";
      input.name = "preference";
      input.value = String(slot);
      input.addEventListener("change", refreshGate);
      label.append(input, document.createTextNode(`Recording ${caption}`));
      choice.append(label);
    }
    form.append(choice);
    formComplete = () =>
      form.querySelector("input[name=preference]:checked") !== null;
    collect = () => {
      const picked = form.querySelector<HTMLInputElement>(
        "input[name=preference]:checked",
      );
      if (!picked) throw new Error("no preference selected");
      return { chosenSide: slotToSide[Number.parseInt(picked.value, 10)] };
    };
  } else {
    addPlayer(task.utterances[0], "Recording");
    const rows = task.dimensions.map((d) => likertRow(d, refreshGate));
    rows.forEach(({ row }) => form.append(row));
    formComplete = () => rows.every(({ value }) => value() !== null);
    collect = () => {
      const values: Record<string, number> = {};
      task.dimensions.forEach((dimension, i) => {
        const value = rows[i].value();
        if (value === null) throw new Error("incomplete ratings");
        values[dimension] = value;
      });
      return { values };
    };
  }

  form.append(hint, submit);
  container.append(form);

  const answer = new Promise<TaskAnswer>((resolve) => {
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      if (submit.disabled) return;
      resolve(collect());
    });
  });
  return { answer, gate };
}

export interface ProgressState {
  completed: number;
  offline: boolean;
}

/** "N rated" counter plus an offline badge when the server is away. */
export function renderProgress(
  container: HTMLElement,
  state: ProgressState,
): void {
  container.replaceChildren();
  container.append(el("span", "progress-count", `${state.completed} rated`));
  if (state.offline) {
    container.append(el("span", "offline-badge", "offline"));
  }
}

export function renderSessionComplete(
  container: HTMLElement,
  completed: number,
): void {
  container.replaceChildren();
  const panel = el("div", "session-complete");
  panel.append(el("h2", undefined, "All done"));
  panel.append(el("p", undefined,
    `You rated ${completed} item${completed === 1 ? "" : "s"}. Thank you!`));
  container.append(panel);
}
