"""Single pipeline entry point: `afroforge <subcommand> [--config ...]`.

A declarative JSON config supplies per-stage settings; command-line
flags override config fields. Every artifact-producing stage appends an
entry to <out_dir>/run_manifest.json recording the config hash, the
seed, and SHA-256 digests of its inputs and outputs, so any file on
disk is attributable to exactly one stage entry. No wall-clock values
are recorded: identical config and seed reproduce identical manifests.

The AFROFORGE_ADAPTER_TIMEOUT_S environment variable overrides every
adapter timeout in a loaded registry.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import replace as dc_replace
from pathlib import Path

from . import corpus, dsp, enhance, metrics, speakers, splits, textnorm
from .audio_io import read_wav, write_wav
from .tables import format_table

logger = logging.getLogger(__name__)

_DSP_DEFAULTS = {
    "target_dbfs": -27.0,
    "vad_aggressiveness": 2,
    "max_pause_ms": 500,
    "frame_ms": 30,
    "resample_hz": 16000,
}


class ConfigError(ValueError):
    """Raised when the pipeline config fails validation."""


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def load_config(path: str | Path) -> dict:
    """Load and validate the pipeline config document."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    try:
        cfg = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if "seed" not in cfg:
        raise ConfigError("config must declare an explicit seed")
    if not isinstance(cfg["seed"], int):
        raise ConfigError(f"seed must be an integer, got {cfg['seed']!r}")
    for key in ("manifest", "rules", "registry", "embeddings", "tasks"):
        if key in cfg and not Path(cfg[key]).exists():
            raise ConfigError(f"config field {key!r} references missing "
                              f"path {cfg[key]}")
    cfg["_hash"] = hashlib.sha256(
        path.read_bytes()).hexdigest()
    return cfg


def _record_stage(out_dir: Path, stage: str, cfg: dict,
                  inputs: list[Path], outputs: list[Path]) -> None:
    manifest_path = out_dir / "run_manifest.json"
    run = {"config_hash": cfg.get("_hash", ""), "seed": cfg.get("seed"),
           "stages": {}}
    if manifest_path.exists():
        run = json.loads(manifest_path.read_text(encoding="utf-8"))
    run["config_hash"] = cfg.get("_hash", "")
    run["seed"] = cfg.get("seed")
    run.setdefault("stages", {})[stage] = {
        "inputs": {str(p): _sha256(Path(p)) for p in sorted(inputs)},
        "outputs": {str(p): _sha256(Path(p)) for p in sorted(outputs)},
    }
    manifest_path.write_text(
        json.dumps(run, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _opt(args: argparse.Namespace, name: str, cfg: dict, cfg_key: str,
         default=None):
    """Flag value if given, else config field, else default."""
    value = getattr(args, name, None)
    if value is not None:
        return value
    return cfg.get(cfg_key, default)


def _dsp_settings(args: argparse.Namespace, cfg: dict) -> dict:
    section = dict(_DSP_DEFAULTS)
    section.update(cfg.get("dsp", {}))
    for flag, key in (("target_dbfs", "target_dbfs"),
                      ("vad_aggr", "vad_aggressiveness"),
                      ("max_pause_ms", "max_pause_ms"),
                      ("frame_ms", "frame_ms"),
                      ("resample", "resample_hz")):
        value = getattr(args, flag, None)
        if value is not None:
            section[key] = value
    return section


def _load_registry(args: argparse.Namespace, cfg: dict) -> enhance.AdapterRegistry:
    registry_path = _opt(args, "registry", cfg, "registry")
    if not registry_path:
        raise ConfigError("adapter registry required: pass --registry or "
                          "set the 'registry' config field")
    registry = enhance.load_registry(registry_path)
    override = os.environ.get("AFROFORGE_ADAPTER_TIMEOUT_S")
    if override:
        registry = enhance.AdapterRegistry(
            [dc_replace(a, timeout_s=float(override)) for a in registry])
    return registry


def _require_manifest(args: argparse.Namespace, cfg: dict) -> corpus.Manifest:
    manifest_path = _opt(args, "manifest", cfg, "manifest")
    if not manifest_path:
        raise ConfigError("manifest required: pass --manifest or set the "
                          "'manifest' config field")
    return corpus.load_manifest(manifest_path,
                                format=getattr(args, "format", None))


def _out_dir(args: argparse.Namespace, cfg: dict) -> Path:
    out = _opt(args, "out_dir", cfg, "out_dir")
    if not out:
        raise ConfigError("output directory required: pass --out-dir or set "
                          "the 'out_dir' config field")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_ingest(args: argparse.Namespace, cfg: dict) -> int:
    manifest = _require_manifest(args, cfg)
    out = _out_dir(args, cfg)
    manifest_out = corpus.write_manifest(
        corpus.rebase_audio_paths(manifest, out), out / "manifest.jsonl")
    stats = corpus.compute_stats(manifest)
    stats_json = out / "stats.json"
    stats_json.write_text(
        json.dumps(stats.to_dicts(), indent=2) + "\n", encoding="utf-8")
    stats_txt = out / "stats.txt"
    stats_txt.write_text(format_table(
        ["country", "n_samples", "n_speakers", "n_accents", "duration_h"],
        [(r.country, r.n_samples, r.n_speakers, r.n_accents,
          f"{r.duration_h:.2f}") for r in stats.rows],
    ) + "\n", encoding="utf-8")
    outputs = [manifest_out, stats_json, stats_txt]
    if args.check_audio:
        checks = corpus.validate_audio(manifest)
        checks_path = out / "audio_checks.jsonl"
        with checks_path.open("w", encoding="utf-8") as f:
            for c in checks:
                f.write(json.dumps({
                    "utterance_id": c.utterance_id,
                    "ok": c.ok, "reason": c.reason,
                }) + "\n")
        outputs.append(checks_path)
        n_bad = sum(1 for c in checks if not c.ok)
        print(f"audio checks: {len(checks) - n_bad} ok, {n_bad} failing")
    _record_stage(out, "ingest",
                  cfg, [Path(_opt(args, 'manifest', cfg, 'manifest'))], outputs)
    print(f"ingested {len(manifest)} records -> {manifest_out}")
    return 0


def cmd_normalize_text(args: argparse.Namespace, cfg: dict) -> int:
    rules_path = _opt(args, "rules", cfg, "rules")
    rules = (textnorm.load_rules(rules_path) if rules_path
             else textnorm.NormalizationRules())
    if getattr(args, "manifest", None) or (cfg.get("manifest")
                                           and getattr(args, "out_dir", None)):
        manifest = _require_manifest(args, cfg)
        out = _out_dir(args, cfg)
        normalized = corpus.Manifest(
            records=tuple(
                dc_replace(rec, text=textnorm.normalize_text(rec.text, rules))
                for rec in manifest
            ),
            source_uri=manifest.source_uri,
        )
        out_path = corpus.write_manifest(
            corpus.rebase_audio_paths(normalized, out), out / "manifest.jsonl")
        inputs = [Path(_opt(args, "manifest", cfg, "manifest"))]
        if rules_path:
            inputs.append(Path(rules_path))
        _record_stage(out, "normalize-text", cfg, inputs, [out_path])
        print(f"normalized transcripts for {len(manifest)} records "
              f"-> {out_path}")
        return 0
    for line in sys.stdin:
        sys.stdout.write(textnorm.normalize_text(line.rstrip("\n"), rules) + "\n")
    return 0


def cmd_preprocess(args: argparse.Namespace, cfg: dict) -> int:
    manifest = _require_manifest(args, cfg)
    out = _out_dir(args, cfg)
    settings = _dsp_settings(args, cfg)
    vad = dsp.VadConfig(
        frame_ms=int(settings["frame_ms"]),
        aggressiveness=int(settings["vad_aggressiveness"]),
        max_pause_ms=int(settings["max_pause_ms"]),
    )
    wav_dir = out / "wav"
    records = []
    report_lines = []
    for rec in manifest:
        verdict = dsp.check_eligibility(rec)
        if verdict is not dsp.Eligibility.ELIGIBLE:
            report_lines.append({
                "utterance_id": rec.utterance_id,
                "status": "excluded",
                "reason": verdict.value,
            })
            continue
        buf = read_wav(manifest.resolve_audio(rec))
        normed = dsp.rms_normalize(buf, float(settings["target_dbfs"]))
        trimmed = dsp.trim_pauses(normed.buffer, vad)
        resampled = dsp.resample(trimmed, int(settings["resample_hz"]))
        out_path = write_wav(resampled, wav_dir / f"{rec.utterance_id}.wav")
        records.append(dc_replace(
            rec,
            audio_path=str(out_path.relative_to(out)),
            duration_s=resampled.duration_s,
            sample_rate_hz=resampled.sample_rate_hz,
        ))
        report_lines.append({
            "utterance_id": rec.utterance_id,
            "status": "processed",
            "gain": normed.gain,
            "clipped": normed.clipped,
            "in_duration_s": buf.duration_s,
            "out_duration_s": resampled.duration_s,
        })
    new_manifest = corpus.Manifest(records=tuple(records), source_uri="")
    manifest_out = corpus.write_manifest(new_manifest, out / "manifest.jsonl")
    report_path = out / "preprocess_report.jsonl"
    with report_path.open("w", encoding="utf-8") as f:
        for line in report_lines:
            f.write(json.dumps(line, sort_keys=True) + "\n")
    outputs = [manifest_out, report_path]
    outputs.extend(sorted(wav_dir.glob("*.wav")))
    _record_stage(out, "preprocess", cfg,
                  [Path(_opt(args, "manifest", cfg, "manifest"))], outputs)
    n_excluded = sum(1 for r in report_lines if r["status"] == "excluded")
    print(f"preprocessed {len(records)} records "
          f"({n_excluded} excluded) -> {manifest_out}")
    return 0


def cmd_enhance(args: argparse.Namespace, cfg: dict) -> int:
    manifest = _require_manifest(args, cfg)
    registry = _load_registry(args, cfg)
    out = _out_dir(args, cfg)
    new_manifest, report = enhance.enhance_manifest(
        manifest, registry, out, max_workers=args.workers)
    manifest_out = corpus.write_manifest(new_manifest, out / "manifest.jsonl")
    report_path = out / "enhance_report.jsonl"
    with report_path.open("w", encoding="utf-8") as f:
        for line in report:
            f.write(json.dumps(line, sort_keys=True) + "\n")
    outputs = [manifest_out, report_path]
    outputs.extend(sorted(out.glob("*/[a-z]*.wav")))
    _record_stage(out, "enhance", cfg,
                  [Path(_opt(args, "manifest", cfg, "manifest")),
                   Path(_opt(args, "registry", cfg, "registry"))],
                  outputs)
    failed = [r for r in report if r["status"] != "ok"]
    print(f"enhanced {len(new_manifest)} records, {len(failed)} failed "
          f"-> {manifest_out}")
    return 1 if failed else 0


def cmd_split(args: argparse.Namespace, cfg: dict) -> int:
    manifest = _require_manifest(args, cfg)
    out = _out_dir(args, cfg)
    section = dict(cfg.get("split", {}))
    split_cfg = splits.SplitConfig(
        test_min_group_minutes=float(
            args.min_group_minutes
            if args.min_group_minutes is not None
            else section.get("test_min_group_minutes", 20.0)),
        test_size=int(args.test_size if args.test_size is not None
                      else section.get("test_size", 736)),
        dev_size=int(args.dev_size if args.dev_size is not None
                     else section.get("dev_size", 200)),
        seed=int(args.seed if args.seed is not None else cfg.get("seed", 0)),
    )
    result = splits.make_splits(manifest, split_cfg)
    outputs = []
    for name, part in (("train", result.train), ("dev", result.dev),
                       ("test", result.test)):
        outputs.append(corpus.write_manifest(
            corpus.rebase_audio_paths(part, out), out / f"{name}.jsonl"))
    report_path = out / "split_report.json"
    report_path.write_text(
        json.dumps(result.report, sort_keys=True, indent=2) + "\n",
        encoding="utf-8")
    outputs.append(report_path)
    _record_stage(out, "split", cfg,
                  [Path(_opt(args, "manifest", cfg, "manifest"))], outputs)
    print(f"split -> train {len(result.train)}, dev {len(result.dev)}, "
          f"test {len(result.test)}")
    return 0


def cmd_balance(args: argparse.Namespace, cfg: dict) -> int:
    manifest = _require_manifest(args, cfg)
    out = _out_dir(args, cfg)
    section = dict(cfg.get("balance", {}))
    balance_cfg = splits.BalanceConfig(
        target_minutes_per_speaker=float(
            args.target_minutes if args.target_minutes is not None
            else section.get("target_minutes_per_speaker", 10.0)))
    balanced, report = splits.balance_duplicate(manifest, balance_cfg)
    manifest_out = corpus.write_manifest(
        corpus.rebase_audio_paths(balanced, out), out / "manifest.jsonl")
    report_path = out / "balance_report.json"
    report_path.write_text(
        json.dumps(report, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    _record_stage(out, "balance", cfg,
                  [Path(_opt(args, "manifest", cfg, "manifest"))],
                  [manifest_out, report_path])
    print(f"balanced {len(manifest)} -> {len(balanced)} records "
          f"-> {manifest_out}")
    return 0


def cmd_embed(args: argparse.Namespace, cfg: dict) -> int:
    manifest = _require_manifest(args, cfg)
    registry = _load_registry(args, cfg)
    embedder = registry.require("embedder")
    out = _out_dir(args, cfg)
    store = speakers.EmbeddingStore()
    # Embed one utterance per speaker: the first in manifest order.
    seen: set[str] = set()
    for rec in manifest:
        if rec.speaker_id in seen:
            continue
        seen.add(rec.speaker_id)
        wav = manifest.resolve_audio(rec).read_bytes()
        parsed = enhance.call_json(embedder, wav)
        vector = parsed.get("vector")
        if vector is None:
            raise enhance.AdapterError(
                f"embedder returned no vector for {rec.utterance_id!r}")
        store.add(speakers.SpeakerEmbedding(
            speaker_id=rec.speaker_id,
            vector=speakers.unit_vector(vector),
            gender=rec.gender, country=rec.country, accent=rec.accent,
        ))
    out_path = speakers.write_embeddings(store, out / "embeddings.jsonl")
    _record_stage(out, "embed", cfg,
                  [Path(_opt(args, "manifest", cfg, "manifest"))], [out_path])
    print(f"embedded {len(store)} speakers -> {out_path}")
    return 0


def cmd_interpolate(args: argparse.Namespace, cfg: dict) -> int:
    embeddings_path = _opt(args, "embeddings", cfg, "embeddings")
    if not embeddings_path:
        raise ConfigError("embeddings file required: pass --embeddings or "
                          "set the 'embeddings' config field")
    out = _out_dir(args, cfg)
    section = dict(cfg.get("personas", {}))
    store = speakers.import_embeddings(embeddings_path)
    personas = speakers.generate_personas(
        store,
        max_sources=int(args.max_sources if args.max_sources is not None
                        else section.get("max_sources", 3)),
        alpha=float(args.alpha if args.alpha is not None
                    else section.get("alpha", 0.5)),
        cap=(args.cap if args.cap is not None else section.get("cap")),
    )
    out_path = speakers.write_personas(personas, out / "personas.jsonl")
    _record_stage(out, "interpolate", cfg, [Path(embeddings_path)], [out_path])
    print(f"generated {len(personas)} personas -> {out_path}")
    return 0


def _read_text_map(path: Path) -> dict[str, str]:
    out: dict[str, str] = {}
    with path.open(encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            raw = json.loads(line)
            out[str(raw["utterance_id"])] = str(raw["text"])
    return out


def cmd_eval_wer(args: argparse.Namespace, cfg: dict) -> int:
    refs = _read_text_map(Path(args.refs))
    hyps = _read_text_map(Path(args.hyps))
    rows = []
    pairs = []
    for utt_id, ref in refs.items():
        hyp = hyps.get(utt_id, "")
        breakdown = metrics.wer(ref, hyp)
        pairs.append(breakdown)
        rows.append((utt_id, breakdown.substitutions, breakdown.deletions,
                     breakdown.insertions, breakdown.ref_words,
                     f"{breakdown.wer:.4f}"))
    total = metrics.WerBreakdown(
        substitutions=sum(b.substitutions for b in pairs),
        deletions=sum(b.deletions for b in pairs),
        insertions=sum(b.insertions for b in pairs),
        ref_words=sum(b.ref_words for b in pairs),
    )
    print(format_table(["utterance", "sub", "del", "ins", "ref_words", "wer"],
                       rows))
    print(f"\ncorpus WER: {total.wer:.4f} "
          f"({total.substitutions}S {total.deletions}D {total.insertions}I "
          f"/ {total.ref_words} words)")
    if args.json:
        Path(args.json).write_text(json.dumps({
            "per_utterance": [
                {"utterance_id": r[0], "substitutions": r[1], "deletions": r[2],
                 "insertions": r[3], "ref_words": r[4], "wer": float(r[5])}
                for r in rows
            ],
            "corpus": {
                "substitutions": total.substitutions,
                "deletions": total.deletions,
                "insertions": total.insertions,
                "ref_words": total.ref_words,
                "wer": total.wer,
            },
        }, indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_eval_eer(args: argparse.Namespace, cfg: dict) -> int:
    raw = json.loads(Path(args.trials).read_text(encoding="utf-8"))
    trials = metrics.ScoreTrials(genuine=tuple(raw["genuine"]),
                                 impostor=tuple(raw["impostor"]))
    value = metrics.eer(trials)
    print(f"EER: {value:.6f} ({100 * value:.2f} %)")
    if args.json:
        Path(args.json).write_text(
            json.dumps({"eer": value}) + "\n", encoding="utf-8")
    return 0


def cmd_eval_mos(args: argparse.Namespace, cfg: dict) -> int:
    from .service import EvalService, load_tasks
    tasks = load_tasks(args.tasks)
    service = EvalService(tasks, log_path=args.ratings)
    try:
        group_by = tuple(d.strip() for d in args.group_by.split(",")
                         if d.strip())
        report = service.results(group_by)
    finally:
        service.close()
    rows = [
        (", ".join(f"{k}={v}" for k, v in row["group"].items()),
         row["dimension"], row["n"], f"{row['mean']:.2f}",
         f"{row['ci95_half_width']:.2f}")
        for row in report["mos"]
    ]
    if rows:
        print(format_table(["group", "dimension", "n", "mean", "ci95"], rows))
    pref_rows = [
        (", ".join(f"{k}={v}" for k, v in row["group"].items()),
         row["wins"], row["rank"])
        for row in report["preference"]
    ]
    if pref_rows:
        print(format_table(["group", "wins", "rank"], pref_rows))
    if args.json:
        Path(args.json).write_text(
            json.dumps(report, sort_keys=True, indent=2) + "\n",
            encoding="utf-8")
    return 0


def cmd_serve(args: argparse.Namespace, cfg: dict) -> int:
    import uvicorn

    from .service import EvalService, create_app, load_tasks
    section = dict(cfg.get("serve", {}))
    tasks_path = args.tasks or section.get("tasks")
    log_path = args.log or section.get("log")
    if not tasks_path or not log_path:
        raise ConfigError("serve requires --tasks and --log")
    service = EvalService(
        load_tasks(tasks_path), log_path=log_path,
        audio_dir=args.audio_dir or section.get("audio_dir"))
    app = create_app(service, ui_dir=args.ui_dir or section.get("ui_dir"))
    uvicorn.run(app, host=args.host or section.get("host", "127.0.0.1"),
                port=int(args.port or section.get("port", 8765)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="afroforge",
        description="Corpus engineering and evaluation pipeline for "
                    "accented multi-speaker TTS.")
    parser.add_argument("--verbose", action="store_true",
                        help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, **kwargs) -> argparse.ArgumentParser:
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(func=func)
        p.add_argument("--config", help="pipeline config JSON")
        return p

    p = add("ingest", cmd_ingest, help="load, validate and summarize a manifest")
    p.add_argument("--manifest")
    p.add_argument("--format", choices=["jsonl", "csv"])
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--check-audio", action="store_true")

    p = add("normalize-text", cmd_normalize_text,
            help="normalize text from stdin or a manifest")
    p.add_argument("--rules")
    p.add_argument("--manifest")
    p.add_argument("--out-dir", dest="out_dir")

    p = add("preprocess", cmd_preprocess,
            help="loudness-normalize, trim pauses, resample")
    p.add_argument("--manifest")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--target-dbfs", dest="target_dbfs", type=float)
    p.add_argument("--vad-aggr", dest="vad_aggr", type=int)
    p.add_argument("--max-pause-ms", dest="max_pause_ms", type=int)
    p.add_argument("--frame-ms", dest="frame_ms", type=int)
    p.add_argument("--resample", dest="resample", type=int)

    p = add("enhance", cmd_enhance,
            help="denoise/restore/score/select via adapters")
    p.add_argument("--manifest")
    p.add_argument("--registry")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--workers", type=int, default=4)

    p = add("split", cmd_split, help="deterministic train/dev/test split")
    p.add_argument("--manifest")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--test-size", dest="test_size", type=int)
    p.add_argument("--dev-size", dest="dev_size", type=int)
    p.add_argument("--min-group-minutes", dest="min_group_minutes", type=float)
    p.add_argument("--seed", type=int)

    p = add("balance", cmd_balance, help="duplicate short speakers to target")
    p.add_argument("--manifest")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--target-minutes", dest="target_minutes", type=float)

    p = add("embed", cmd_embed, help="extract speaker embeddings via adapter")
    p.add_argument("--manifest")
    p.add_argument("--registry")
    p.add_argument("--out-dir", dest="out_dir")

    p = add("interpolate", cmd_interpolate,
            help="generate blended personas from an embedding store")
    p.add_argument("--embeddings")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--alpha", type=float)
    p.add_argument("--max-sources", dest="max_sources", type=int)
    p.add_argument("--cap", type=int)

    p = add("eval", lambda a, c: 2, help="objective metric reports")
    eval_sub = p.add_subparsers(dest="metric", required=True)
    pw = eval_sub.add_parser("wer")
    pw.set_defaults(func=cmd_eval_wer)
    pw.add_argument("--config")
    pw.add_argument("--refs", required=True)
    pw.add_argument("--hyps", required=True)
    pw.add_argument("--json")
    pe = eval_sub.add_parser("eer")
    pe.set_defaults(func=cmd_eval_eer)
    pe.add_argument("--config")
    pe.add_argument("--trials", required=True)
    pe.add_argument("--json")
    pm = eval_sub.add_parser("mos")
    pm.set_defaults(func=cmd_eval_mos)
    pm.add_argument("--config")
    pm.add_argument("--ratings", required=True)
    pm.add_argument("--tasks", required=True)
    pm.add_argument("--group-by", dest="group_by", default="model")
    pm.add_argument("--json")

    p = add("serve", cmd_serve, help="run the listening-test HTTP service")
    p.add_argument("--tasks")
    p.add_argument("--log")
    p.add_argument("--port", type=int)
    p.add_argument("--host")
    p.add_argument("--audio-dir", dest="audio_dir")
    p.add_argument("--ui-dir", dest="ui_dir")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s")
    cfg: dict = {}
    try:
        if getattr(args, "config", None):
            cfg = load_config(args.config)
        return args.func(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (corpus.ManifestError, textnorm.RulesError, dsp.DspError,
            metrics.MetricError, speakers.EmbeddingError, splits.SplitError,
            splits.BalanceError, enhance.AdapterError,
            enhance.EnhancementError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
