/** Shared test doubles: fake players and DOM interaction helpers. */

import type { Player, PlayerFactory } from "../src/player.js";
import type { TaskView } from "../src/types.js";

export interface FakePlayers {
  factory: PlayerFactory;
  /** Fire the "ended" event on every player created so far. */
  endAll(): void;
  created: string[];
}

export function fakePlayers(): FakePlayers {
  const triggers: Array<() => void> = [];
  const created: string[] = [];
  const factory: PlayerFactory = (url: string): Player => {
    created.push(url);
    const element = document.createElement("div");
    element.className = "fake-player";
    let callback: (() => void) | null = null;
    triggers.push(() => callback?.());
    return {
      element,
      onEnded(cb: () => void): void {
        callback = cb;
      },
    };
  };
  return { factory, endAll: () => triggers.forEach((t) => t()), created };
}

export function mosTask(id: string, dimensions: string[] = ["overall"]): TaskView {
  return {
    task_id: id,
    kind: "mos",
    utterances: [`utt-${id}`],
    dimensions,
    reference: { country: "NG", accent: "yoruba", gender: "female" },
    text: "sample sentence",
  };
}

export function preferenceTask(id: string): TaskView {
  return {
    task_id: id,
    kind: "preference",
    utterances: [`utt-${id}-x`, `utt-${id}-y`],
    dimensions: ["naturalness"],
    reference: { country: "NG", accent: "yoruba", gender: "female" },
    text: "both systems read this sentence",
  };
}

export function pickLikert(
  container: HTMLElement,
  dimension: string,
  value: number,
): void {
  const input = container.querySelector<HTMLInputElement>(
    `input[name="likert-${dimension}"][value="${value}"]`,
  );
  if (!input) throw new Error(`no likert input for ${dimension}=${value}`);
  input.checked = true;
  input.dispatchEvent(new Event("change"));
}

export function pickPreferenceSlot(container: HTMLElement, slot: 0 | 1): void {
  const input = container.querySelector<HTMLInputElement>(
    `input[name="preference"][value="${slot}"]`,
  );
  if (!input) throw new Error(`no preference input for slot ${slot}`);
  input.checked = true;
  input.dispatchEvent(new Event("change"));
}

export function submitForm(container: HTMLElement): void {
  const form = container.querySelector("form");
  if (!form) throw new Error("no form rendered");
  form.dispatchEvent(new Event("submit", { cancelable: true }));
}

export function submitEnabled(container: HTMLElement): boolean {
  const button = container.querySelector<HTMLButtonElement>("button.submit");
  if (!button) throw new Error("no submit button rendered");
  return !button.disabled;
}

/** Resolve to "pending" if the promise has not settled within a tick. */
export async function settledState<T>(
  promise: Promise<T>,
): Promise<"resolved" | "pending"> {
  const marker = Symbol("pending");
  const winner = await Promise.race([
    promise,
    new Promise<typeof marker>((resolve) =>
      setTimeout(() => resolve(marker), 25),
    ),
  ]);
  return winner === marker ? "pending" : "resolved";
}
