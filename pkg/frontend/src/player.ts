/**
 * Audio playback with a completion gate.
 *
 * Submission must stay disabled until every utterance of the current
 * task has been played to the end at least once, so the gate tracks
 * "ended" events per utterance. The player itself is injectable: the
 * browser uses an <audio> element, tests use a fake that ends on
 * demand.
 */

export interface Player {
  /** Root node to insert into the task view. */
  element: HTMLElement;
  /** Register a callback fired every time playback reaches the end. */
  onEnded(callback: () => void): void;
}

export type PlayerFactory = (url: string) => Player;

/** Streams from the service's audio endpoint; no local caching. */
export function htmlAudioPlayer(url: string): Player {
  const audio = document.createElement("audio");
  audio.controls = true;
  audio.preload = "none";
  audio.src = url;
  return {
    element: audio,
    onEnded(callback: () => void): void {
      audio.addEventListener("ended", callback);
    },
  };
}

export class PlaybackGate {
  private completed = new Set<string>();

  constructor(private required: readonly string[]) {}

  markEnded(utteranceId: string): void {
    this.completed.add(utteranceId);
  }

  get open(): boolean {
    return this.required.every((id) => this.completed.has(id));
  }
}
