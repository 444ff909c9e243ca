/**
 * Browser entry point: one rater session per tab.
 *
 * The rater token is persisted in localStorage so a reload resumes the
 * same identity; rater metadata comes from a one-time form.
 */

import { ApiClient } from "./api.js";
import { htmlAudioPlayer } from "./player.js";
import {
  renderProgress,
  renderSessionComplete,
  renderTask,
} from "./render.js";
import { runSession, type TaskPresenter } from "./session.js";
import type { RaterMeta, TaskAnswer, TaskView } from "./types.js";

const TOKEN_KEY = "afroforge-rater-token";

function raterToken(): string {
  let token = window.localStorage.getItem(TOKEN_KEY);
  if (!token) {
    token = `rater-${Math.random().toString(36).slice(2, 12)}`;
    window.localStorage.setItem(TOKEN_KEY, token);
  }
  return token;
}

function askMeta(root: HTMLElement): Promise<RaterMeta> {
  return new Promise((resolve) => {
    root.replaceChildren();
    const form = document.createElement("form");
    form.className = "meta-form";
    form.innerHTML = `
      <h2>About you</h2>
      <label>Country code <input name="country" maxlength="2" required
             placeholder="NG"></label>
      <label>Accent <input name="accent" placeholder="Yoruba"></label>
      <label>Gender
        <select name="gender">
          <option value="">prefer not to say</option>
          <option value="female">female</option>
          <option value="male">male</option>
        </select>
      </label>
      <button type="submit">Start rating</button>
    `;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const data = new FormData(form);
      resolve({
        country: String(data.get("country") ?? "").toUpperCase().trim(),
        accent: String(data.get("accent") ?? "").trim(),
        gender: String(data.get("gender") ?? ""),
      });
    });
    root.append(form);
  });
}

export async function start(): Promise<void> {
  const root = document.querySelector<HTMLElement>("#app");
  const progress = document.querySelector<HTMLElement>("#progress");
  if (!root || !progress) {
    throw new Error("missing #app or #progress container");
  }
  const api = new ApiClient("");
  const meta = await askMeta(root);

  const presenter: TaskPresenter = {
    present(task: TaskView): Promise<TaskAnswer> {
      return renderTask(root, task, {
        playerFactory: htmlAudioPlayer,
        audioUrl: (id) => api.audioUrl(id),
      }).answer;
    },
    sessionComplete(completed: number): void {
      renderSessionComplete(root, completed);
    },
  };

  await runSession(api, raterToken(), meta, presenter, {
    onProgress: (completed, offline) =>
      renderProgress(progress, { completed, offline }),
  });
}

if (typeof document !== "undefined" && document.querySelector("#app")) {
  void start();
}
