"""CLI wiring: subcommands, config handling, run-manifest bookkeeping."""

from __future__ import annotations

import json
import shlex
import sys
from pathlib import Path

import pytest

from afroforge.cli import load_config, main
from afroforge.corpus import load_manifest
from conftest import make_record, write_manifest_file

PY = shlex.quote(sys.executable)


def write_registry(path: Path) -> Path:
    path.write_text(json.dumps([
        {"name": "den", "kind": "denoiser",
         "endpoint": f"{PY} -m afroforge.mocks denoise"},
        {"name": "res", "kind": "restorer",
         "endpoint": f"{PY} -m afroforge.mocks restore"},
        {"name": "est", "kind": "quality_estimator",
         "endpoint": f"{PY} -m afroforge.mocks score"},
        {"name": "emb", "kind": "embedder",
         "endpoint": f"{PY} -m afroforge.mocks embed"},
    ]), encoding="utf-8")
    return path


class TestConfig:
    def test_seed_required(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("{}", encoding="utf-8")
        with pytest.raises(Exception, match="seed"):
            load_config(path)

    def test_missing_referenced_path_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"seed": 1, "manifest": "nope.jsonl"}),
                        encoding="utf-8")
        with pytest.raises(Exception, match="manifest"):
            load_config(path)

    def test_missing_registry_field_named_in_error(self, tmp_path, capsys):
        manifest = write_manifest_file(tmp_path / "m.jsonl",
                                       [make_record(0)])
        code = main(["enhance", "--manifest", str(manifest),
                     "--out-dir", str(tmp_path / "out")])
        assert code == 2
        assert "registry" in capsys.readouterr().err

    def test_config_hash_recorded(self, tmp_path, tiny_corpus):
        manifest_path, _ = tiny_corpus
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({
            "seed": 7, "manifest": str(manifest_path),
            "out_dir": str(tmp_path / "out"),
        }), encoding="utf-8")
        assert main(["ingest", "--config", str(cfg_path)]) == 0
        run = json.loads((tmp_path / "out" / "run_manifest.json").read_text())
        assert run["seed"] == 7
        assert len(run["config_hash"]) == 64
        assert "ingest" in run["stages"]


class TestIngest:
    def test_produces_stats_and_manifest(self, tmp_path, tiny_corpus, capsys):
        manifest_path, _ = tiny_corpus
        out = tmp_path / "out"
        code = main(["ingest", "--manifest", str(manifest_path),
                     "--out-dir", str(out), "--check-audio"])
        assert code == 0
        stats = json.loads((out / "stats.json").read_text())
        assert stats[0]["country"] == "NG"
        assert stats[0]["n_samples"] == 3
        table = (out / "stats.txt").read_text()
        assert "country" in table and "NG" in table
        checks = [json.loads(line) for line in
                  (out / "audio_checks.jsonl").read_text().splitlines()]
        assert all(c["ok"] for c in checks)

    def test_bad_manifest_exits_one(self, tmp_path, capsys):
        bad = tmp_path / "bad.jsonl"
        row = make_record(0).to_dict()
        row["country"] = "XX"
        bad.write_text(json.dumps(row) + "\n", encoding="utf-8")
        assert main(["ingest", "--manifest", str(bad),
                     "--out-dir", str(tmp_path / "out")]) == 1


class TestNormalizeText:
    def test_stdin_stdout(self, tmp_path, capsys, monkeypatch):
        import io
        monkeypatch.setattr("sys.stdin",
                            io.StringIO("Maj Okafor: 2 pills\n"))
        assert main(["normalize-text"]) == 0
        assert capsys.readouterr().out == "Major Okafor colon two pills\n"

    def test_manifest_mode(self, tmp_path, capsys):
        records = [make_record(0, text="Alh Musa took 2 pills")]
        manifest_path = write_manifest_file(tmp_path / "m.jsonl", records)
        out = tmp_path / "out"
        assert main(["normalize-text", "--manifest", str(manifest_path),
                     "--out-dir", str(out)]) == 0
        normalized = load_manifest(out / "manifest.jsonl")
        assert normalized.records[0].text == "Alhaji Musa took two pills"


class TestPreprocess:
    def test_pipeline_outputs(self, tmp_path, tiny_corpus, capsys):
        manifest_path, manifest = tiny_corpus
        out = tmp_path / "pre"
        code = main(["preprocess", "--manifest", str(manifest_path),
                     "--out-dir", str(out), "--target-dbfs", "-27",
                     "--vad-aggr", "2", "--max-pause-ms", "500",
                     "--resample", "16000"])
        assert code == 0
        processed = load_manifest(out / "manifest.jsonl")
        assert len(processed) == 3
        assert all(r.sample_rate_hz == 16000 for r in processed)
        report = [json.loads(line) for line in
                  (out / "preprocess_report.jsonl").read_text().splitlines()]
        assert all(r["status"] == "processed" for r in report)
        assert all((out / r.audio_path).exists() for r in processed)

    def test_ineligible_excluded(self, tmp_path, capsys):
        from afroforge.audio_io import write_wav
        from conftest import tone
        ok = make_record(0, duration_s=0.5, sample_rate_hz=16000)
        too_texty = make_record(1, duration_s=0.5, sample_rate_hz=16000,
                                text="a" * 401)
        for rec in (ok, too_texty):
            write_wav(tone(440, 0.5, 16000, 0.3), tmp_path / rec.audio_path)
        manifest_path = write_manifest_file(tmp_path / "m.jsonl",
                                            [ok, too_texty])
        out = tmp_path / "pre"
        assert main(["preprocess", "--manifest", str(manifest_path),
                     "--out-dir", str(out)]) == 0
        processed = load_manifest(out / "manifest.jsonl")
        assert [r.utterance_id for r in processed] == ["u0000"]
        report = {r["utterance_id"]: r for r in map(json.loads,
                  (out / "preprocess_report.jsonl").read_text().splitlines())}
        assert report["u0001"]["status"] == "excluded"
        assert report["u0001"]["reason"] == "too_long_text"


class TestSplitBalance:
    def make_corpus(self, tmp_path) -> Path:
        records = []
        i = 0
        for spk, (minutes, count) in {
            "a": (25.0, 30), "b": (25.0, 30), "c": (5.0, 20),
        }.items():
            for _ in range(count):
                records.append(make_record(i, speaker=spk,
                                           duration_s=minutes * 60 / count))
                i += 1
        return write_manifest_file(tmp_path / "m.jsonl", records)

    def test_split_cli(self, tmp_path, capsys):
        manifest_path = self.make_corpus(tmp_path)
        out = tmp_path / "split"
        code = main(["split", "--manifest", str(manifest_path),
                     "--out-dir", str(out), "--test-size", "10",
                     "--dev-size", "8", "--seed", "5"])
        assert code == 0
        test = load_manifest(out / "test.jsonl")
        dev = load_manifest(out / "dev.jsonl")
        train = load_manifest(out / "train.jsonl")
        assert (len(test), len(dev), len(train)) == (10, 8, 62)
        assert {r.speaker_id for r in test} <= {"a", "b"}
        report = json.loads((out / "split_report.json").read_text())
        assert report["sizes"] == {"train": 62, "dev": 8, "test": 10}

    def test_balance_cli(self, tmp_path, capsys):
        records = [make_record(i, speaker="short", duration_s=60.0)
                   for i in range(4)]
        manifest_path = write_manifest_file(tmp_path / "m.jsonl", records)
        out = tmp_path / "bal"
        code = main(["balance", "--manifest", str(manifest_path),
                     "--out-dir", str(out), "--target-minutes", "10"])
        assert code == 0
        balanced = load_manifest(out / "manifest.jsonl")
        assert len(balanced) == 12  # 4 minutes -> 3 copies
        report = json.loads((out / "balance_report.json").read_text())
        assert report["multipliers"] == {"short": 3}


class TestEmbedInterpolate:
    def test_embed_then_interpolate(self, tmp_path, tiny_corpus, capsys):
        manifest_path, _ = tiny_corpus
        registry = write_registry(tmp_path / "adapters.json")
        out = tmp_path / "emb"
        code = main(["embed", "--manifest", str(manifest_path),
                     "--registry", str(registry), "--out-dir", str(out)])
        assert code == 0
        lines = (out / "embeddings.jsonl").read_text().splitlines()
        assert len(lines) == 3  # one per speaker
        # All three tiny-corpus speakers share (gender, country, accent).
        out2 = tmp_path / "personas"
        code = main(["interpolate", "--embeddings",
                     str(out / "embeddings.jsonl"), "--out-dir", str(out2)])
        assert code == 0
        personas = [json.loads(line) for line in
                    (out2 / "personas.jsonl").read_text().splitlines()]
        assert len(personas) == 4  # C(3,2) + C(3,3)
        assert all(p["renormalized"] for p in personas)


class TestEval:
    def test_eval_wer(self, tmp_path, capsys):
        refs = tmp_path / "refs.jsonl"
        hyps = tmp_path / "hyps.jsonl"
        refs.write_text(json.dumps(
            {"utterance_id": "u1", "text": "the quick brown fox"}) + "\n",
            encoding="utf-8")
        hyps.write_text(json.dumps(
            {"utterance_id": "u1", "text": "the quick fox"}) + "\n",
            encoding="utf-8")
        out_json = tmp_path / "wer.json"
        code = main(["eval", "wer", "--refs", str(refs), "--hyps", str(hyps),
                     "--json", str(out_json)])
        assert code == 0
        assert "0.2500" in capsys.readouterr().out
        assert json.loads(out_json.read_text())["corpus"]["wer"] == 0.25

    def test_eval_eer(self, tmp_path, capsys):
        trials = tmp_path / "trials.json"
        trials.write_text(json.dumps({
            "genuine": [0.9, 0.4], "impostor": [0.6, 0.1]}), encoding="utf-8")
        assert main(["eval", "eer", "--trials", str(trials)]) == 0
        assert "0.500000" in capsys.readouterr().out

    def test_eval_mos(self, tmp_path, capsys):
        tasks = tmp_path / "tasks.jsonl"
        tasks.write_text(json.dumps({
            "task_id": "t1", "kind": "mos", "utterances": ["u1"],
            "dimensions": ["overall"], "models": ["m1"], "country": "NG",
        }) + "\n", encoding="utf-8")
        events = tmp_path / "events.jsonl"
        rows = [
            {"task_id": "t1", "rater_id": f"r{i}",
             "values": {"overall": score}, "timestamp": 1.0}
            for i, score in enumerate((3, 3, 3))
        ]
        events.write_text("\n".join(json.dumps(r) for r in rows) + "\n",
                          encoding="utf-8")
        code = main(["eval", "mos", "--ratings", str(events),
                     "--tasks", str(tasks), "--group-by", "model"])
        assert code == 0
        out = capsys.readouterr().out
        assert "3.00" in out and "overall" in out


class TestRunManifest:
    def test_identical_config_reruns_identically(self, tmp_path, monkeypatch):
        # Same config, fresh output dir: run manifests must be identical.
        records = [make_record(i, speaker=f"s{i}", duration_s=120.0)
                   for i in range(10)]
        for workdir in (tmp_path / "run1", tmp_path / "run2"):
            workdir.mkdir()
            write_manifest_file(workdir / "m.jsonl", records)
            cfg = workdir / "cfg.json"
            cfg.write_text(json.dumps({
                "seed": 11, "manifest": "m.jsonl", "out_dir": "out",
                "split": {"test_size": 3, "dev_size": 2,
                          "test_min_group_minutes": 1.0},
            }), encoding="utf-8")
            monkeypatch.chdir(workdir)
            assert main(["split", "--config", "cfg.json"]) == 0
        run1 = (tmp_path / "run1" / "out" / "run_manifest.json").read_bytes()
        run2 = (tmp_path / "run2" / "out" / "run_manifest.json").read_bytes()
        assert run1 == run2
