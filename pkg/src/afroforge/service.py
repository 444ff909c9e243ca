"""Listening-test backend: task assignment, rating intake, aggregation.

State is event-sourced: every accepted rating is appended to a JSONL
log (one event per line) before it is acknowledged, and all aggregates
are recomputed from the in-memory replica of that log. Replaying the
log from an empty state therefore reproduces results byte-identically.

A resubmission by the same rater on the same task replaces the earlier
event; the replacement is flagged on the audit logger
("afroforge.service.audit"), while the event log itself stays pure.
Raters are anonymous tokens; no personal data is stored.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import os
import threading
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .metrics import aggregate_mos, preference_ranking

logger = logging.getLogger(__name__)
audit_log = logging.getLogger("afroforge.service.audit")

TASK_KINDS = ("mos", "accent_match", "preference")
RATING_DIMENSIONS = (
    "overall", "naturalness", "accentedness",
    "accent_match", "country_match", "gender_match",
)
GROUPABLE = ("model", "country", "accent", "gender")
SIDES = ("left", "right")


class TaskError(ValueError):
    """Raised for malformed tasks or task files."""


class SubmissionError(ValueError):
    """Raised when a rating event fails validation."""


class UnknownTaskError(SubmissionError):
    """Raised when an event references a task not in the pool."""


@dataclass(frozen=True)
class RatingTask:
    """One unit of rater work: rate an utterance or compare a pair."""

    task_id: str
    kind: str
    utterances: tuple[str, ...]
    dimensions: tuple[str, ...]
    models: tuple[str, ...]
    country: str = ""
    accent: str = ""
    gender: str = ""
    text: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "utterances", tuple(self.utterances))
        object.__setattr__(self, "dimensions", tuple(self.dimensions))
        object.__setattr__(self, "models", tuple(self.models))
        if self.kind not in TASK_KINDS:
            raise TaskError(f"unknown task kind {self.kind!r}")
        if not self.dimensions:
            raise TaskError(f"task {self.task_id!r} has no dimensions")
        bad = set(self.dimensions) - set(RATING_DIMENSIONS)
        if bad:
            raise TaskError(f"task {self.task_id!r} has unknown "
                            f"dimensions {sorted(bad)}")
        if self.kind == "preference":
            if len(self.utterances) != 2:
                raise TaskError(
                    f"preference task {self.task_id!r} needs exactly 2 "
                    f"utterances, got {len(self.utterances)}")
            if len(self.models) != 2 or self.models[0] == self.models[1]:
                raise TaskError(
                    f"preference task {self.task_id!r} needs 2 distinct "
                    f"models, got {self.models}")
        else:
            if len(self.utterances) != 1:
                raise TaskError(
                    f"{self.kind} task {self.task_id!r} needs exactly 1 "
                    f"utterance, got {len(self.utterances)}")
            if len(self.models) != 1:
                raise TaskError(
                    f"{self.kind} task {self.task_id!r} needs exactly 1 "
                    f"model, got {self.models}")

    def public_view(self) -> dict:
        """The payload a rater may see: never includes model identity."""
        return {
            "task_id": self.task_id,
            "kind": self.kind,
            "utterances": list(self.utterances),
            "dimensions": list(self.dimensions),
            "reference": {
                "country": self.country,
                "accent": self.accent,
                "gender": self.gender,
            },
            "text": self.text,
        }


@dataclass(frozen=True)
class RaterMeta:
    country: str = ""
    accent: str = ""
    gender: str = ""


@dataclass(frozen=True)
class RatingEvent:
    """One human judgment: Likert values or a pairwise choice."""

    task_id: str
    rater_id: str
    rater_meta: RaterMeta = field(default_factory=RaterMeta)
    values: dict[str, int] | None = None
    chosen_side: str | None = None
    timestamp: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, raw: dict) -> "RatingEvent":
        meta = raw.get("rater_meta") or {}
        return cls(
            task_id=str(raw["task_id"]),
            rater_id=str(raw["rater_id"]),
            rater_meta=RaterMeta(
                country=str(meta.get("country", "")),
                accent=str(meta.get("accent", "")),
                gender=str(meta.get("gender", "")),
            ),
            values=raw.get("values"),
            chosen_side=raw.get("chosen_side"),
            timestamp=float(raw.get("timestamp", 0.0)),
        )


def load_tasks(path: str | Path) -> list[RatingTask]:
    """Read a JSONL task pool; file order defines task age."""
    tasks: list[RatingTask] = []
    seen: set[str] = set()
    with Path(path).open(encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise TaskError(
                    f"malformed JSON on line {line_no}: {exc}") from exc
            try:
                task = RatingTask(
                    task_id=str(raw["task_id"]),
                    kind=str(raw["kind"]),
                    utterances=tuple(raw["utterances"]),
                    dimensions=tuple(raw["dimensions"]),
                    models=tuple(raw["models"]),
                    country=str(raw.get("country", "")),
                    accent=str(raw.get("accent", "")),
                    gender=str(raw.get("gender", "")),
                    text=str(raw.get("text", "")),
                )
            except KeyError as exc:
                raise TaskError(
                    f"missing field {exc} on line {line_no}") from exc
            if task.task_id in seen:
                raise TaskError(f"duplicate task_id {task.task_id!r} "
                                f"on line {line_no}")
            seen.add(task.task_id)
            tasks.append(task)
    return tasks


@dataclass(frozen=True)
class SubmitAck:
    accepted: bool
    replaced: bool


class EvalService:
    """Event-sourced rating collector over a fixed task pool.

    Appends are serialized through one lock and fsynced before the
    acknowledgment is returned, so no acknowledged rating can be lost.
    Task assignment reads a consistent snapshot under the same lock;
    two concurrent raters may legitimately receive the same task.
    """

    def __init__(self, tasks: list[RatingTask], log_path: str | Path,
                 audio_dir: str | Path | None = None):
        self._tasks: dict[str, RatingTask] = {}
        self._task_order: dict[str, int] = {}
        for i, task in enumerate(tasks):
            if task.task_id in self._tasks:
                raise TaskError(f"duplicate task_id {task.task_id!r}")
            self._tasks[task.task_id] = task
            self._task_order[task.task_id] = i
        self._log_path = Path(log_path)
        self._audio_dir = Path(audio_dir) if audio_dir else None
        self._lock = threading.Lock()
        self._events: dict[tuple[str, str], RatingEvent] = {}
        self._replay()
        self._log_path.parent.mkdir(parents=True, exist_ok=True)
        self._log_file = self._log_path.open("a", encoding="utf-8")

    def _replay(self) -> None:
        if not self._log_path.exists():
            return
        with self._log_path.open(encoding="utf-8") as f:
            for line_no, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                event = RatingEvent.from_dict(json.loads(line))
                try:
                    self._validate(event)
                except SubmissionError as exc:
                    raise SubmissionError(
                        f"corrupt event log line {line_no}: {exc}") from exc
                self._events[(event.task_id, event.rater_id)] = event

    @property
    def tasks(self) -> list[RatingTask]:
        return list(self._tasks.values())

    def audio_path(self, utterance_id: str) -> Path | None:
        if self._audio_dir is None:
            return None
        # Ids come straight off the URL; refuse anything path-shaped.
        if not utterance_id or any(s in utterance_id for s in ("/", "\\", "..")):
            return None
        path = self._audio_dir / f"{utterance_id}.wav"
        return path if path.exists() else None

    def _rating_counts(self) -> dict[str, int]:
        counts = {tid: 0 for tid in self._tasks}
        for task_id, _rater in self._events:
            counts[task_id] += 1
        return counts

    def next_task(self, rater_id: str,
                  rater_meta: RaterMeta | None = None) -> RatingTask | None:
        """Pick the least-rated eligible task for this rater.

        Accent-match tasks go only to raters from the utterance's
        country; a rater never sees a task they already completed. Ties
        on rating count resolve to the oldest task (pool order). Returns
        None when nothing is eligible.
        """
        meta = rater_meta or RaterMeta()
        with self._lock:
            counts = self._rating_counts()
            best: RatingTask | None = None
            best_key: tuple[int, int] | None = None
            for task in self._tasks.values():
                if (task.task_id, rater_id) in self._events:
                    continue
                if task.kind == "accent_match" and task.country != meta.country:
                    continue
                key = (counts[task.task_id], self._task_order[task.task_id])
                if best_key is None or key < best_key:
                    best, best_key = task, key
            return best

    def _validate(self, event: RatingEvent) -> RatingTask:
        task = self._tasks.get(event.task_id)
        if task is None:
            raise UnknownTaskError(f"unknown task {event.task_id!r}")
        if not event.rater_id:
            raise SubmissionError("rater_id must be non-empty")
        if task.kind == "preference":
            if event.chosen_side not in SIDES:
                raise SubmissionError(
                    f"preference task {task.task_id!r} requires chosen_side "
                    f"in {SIDES}, got {event.chosen_side!r}")
            if event.values:
                raise SubmissionError(
                    "preference submissions carry chosen_side, not values")
        else:
            if event.chosen_side is not None:
                raise SubmissionError(
                    f"{task.kind} submissions must not set chosen_side")
            if not event.values:
                raise SubmissionError(
                    f"{task.kind} task {task.task_id!r} requires values")
            expected = set(task.dimensions)
            got = set(event.values)
            if got != expected:
                raise SubmissionError(
                    f"values must cover exactly {sorted(expected)}, "
                    f"got {sorted(got)}")
            for dim, value in event.values.items():
                if isinstance(value, bool) or not isinstance(value, int):
                    raise SubmissionError(
                        f"rating for {dim!r} must be an integer "
                        f"(1.0 intervals), got {value!r}")
                if not 1 <= value <= 5:
                    raise SubmissionError(
                        f"rating {value} for {dim!r} outside 1..5")
        return task

    def submit(self, event: RatingEvent) -> SubmitAck:
        """Validate, durably append, then acknowledge one rating event."""
        self._validate(event)
        if event.timestamp == 0.0:
            event = dataclasses.replace(event, timestamp=time.time())
        key = (event.task_id, event.rater_id)
        with self._lock:
            replaced = key in self._events
            line = json.dumps(event.to_dict(), sort_keys=True,
                              ensure_ascii=False)
            self._log_file.write(line + "\n")
            self._log_file.flush()
            os.fsync(self._log_file.fileno())
            self._events[key] = event
            if replaced:
                audit_log.warning(
                    "resubmission: rater %s replaced their rating on task %s",
                    event.rater_id, event.task_id)
        return SubmitAck(accepted=True, replaced=replaced)

    def _group_key(self, task: RatingTask, group_by: tuple[str, ...],
                   model: str) -> tuple[tuple[str, str], ...]:
        parts = []
        for dim in group_by:
            if dim == "model":
                parts.append(("model", model))
            else:
                parts.append((dim, getattr(task, dim)))
        return tuple(parts)

    def results(self, group_by: tuple[str, ...] = ("model",)) -> dict:
        """Aggregate the current event state into a metric report.

        MOS-style events produce per-dimension mean and 95 % CI
        half-width rows; preference events produce win counts ranked
        within each non-model grouping. Groups with no events are
        omitted; output ordering is fully deterministic.
        """
        bad = set(group_by) - set(GROUPABLE)
        if bad:
            raise ValueError(f"cannot group by {sorted(bad)}; "
                             f"choose from {GROUPABLE}")
        with self._lock:
            events = list(self._events.values())

        mos_values: dict[tuple, dict[str, list[int]]] = {}
        pref_wins: dict[tuple, int] = {}
        for event in events:
            task = self._tasks[event.task_id]
            if task.kind == "preference":
                winner = task.models[SIDES.index(event.chosen_side)]
                key = self._group_key(task, group_by, winner)
                pref_wins[key] = pref_wins.get(key, 0) + 1
            else:
                key = self._group_key(task, group_by, task.models[0])
                per_dim = mos_values.setdefault(key, {})
                for dim, value in event.values.items():
                    per_dim.setdefault(dim, []).append(value)

        mos_rows = []
        for key in sorted(mos_values):
            for dim in sorted(mos_values[key]):
                summary = aggregate_mos(mos_values[key][dim])
                mos_rows.append({
                    "group": dict(key),
                    "dimension": dim,
                    "n": summary.n,
                    "mean": summary.mean,
                    "ci95_half_width": summary.ci95_half_width,
                })

        # Rank win counts among groups that share everything but the model.
        clusters: dict[tuple, dict[str, int]] = {}
        for key, wins in pref_wins.items():
            rest = tuple(kv for kv in key if kv[0] != "model")
            model = dict(key).get("model", "")
            clusters.setdefault(rest, {})[model] = wins
        pref_rows = []
        for rest in sorted(clusters):
            for entry in preference_ranking(clusters[rest]):
                row = {"group": dict(rest), "wins": entry.wins,
                       "rank": entry.rank}
                if "model" in group_by:
                    row["group"]["model"] = entry.model
                pref_rows.append(row)

        return {
            "group_by": list(group_by),
            "n_events": len(events),
            "mos": mos_rows,
            "preference": pref_rows,
        }

    def results_json(self, group_by: tuple[str, ...] = ("model",)) -> bytes:
        """Canonical bytes of the results report (stable across replays)."""
        return json.dumps(self.results(group_by), sort_keys=True,
                          ensure_ascii=False).encode("utf-8")

    def close(self) -> None:
        self._log_file.close()


def create_app(service: EvalService, ui_dir: str | Path | None = None):
    """Wire an EvalService into the HTTP JSON API."""
    from fastapi import FastAPI, HTTPException
    from fastapi.responses import FileResponse, Response

    app = FastAPI(title="afroforge listening test")

    @app.get("/api/tasks/next")
    def api_next_task(rater: str, country: str = "", accent: str = "",
                      gender: str = ""):
        if not rater:
            raise HTTPException(status_code=422, detail="rater token required")
        meta = RaterMeta(country=country, accent=accent, gender=gender)
        task = service.next_task(rater, meta)
        if task is None:
            raise HTTPException(status_code=404,
                                detail="no eligible task for this rater")
        return task.public_view()

    @app.post("/api/ratings")
    def api_submit(payload: dict):
        try:
            event = RatingEvent.from_dict(payload)
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(status_code=422,
                                detail=f"malformed event: {exc}") from exc
        try:
            ack = service.submit(event)
        except UnknownTaskError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except SubmissionError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return {"status": "accepted", "replaced": ack.replaced}

    @app.get("/api/results")
    def api_results(group_by: str = "model"):
        dims = tuple(d.strip() for d in group_by.split(",") if d.strip())
        try:
            report = service.results(dims or ("model",))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return Response(content=json.dumps(report, sort_keys=True,
                                           ensure_ascii=False),
                        media_type="application/json")

    @app.get("/api/audio/{utterance_id}")
    def api_audio(utterance_id: str):
        path = service.audio_path(utterance_id)
        if path is None:
            raise HTTPException(status_code=404,
                                detail=f"no audio for {utterance_id!r}")
        return FileResponse(path, media_type="audio/wav")

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True),
                  name="ui")
    return app
