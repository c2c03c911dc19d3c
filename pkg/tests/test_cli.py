import json
from pathlib import Path

import pytest

from src.cli.main import build_parser, build_registry, main
from src.config.run_config import build_run_config
from src.pipeline.params import init_params
from src.stats.result_table import read_csv_rows

RUN_CONFIG = """\
window_k: 1
d_model: 4
depth: 1
n_freq_bins: 3
epochs: 2
patience: 2
batch_size: 4
seed: 3
"""

SYNTH_SPEC = """\
seed: 2
n_conversations: 8
n_val: 2
n_test: 2
min_utterances: 3
max_utterances: 5
n_classes: 3
dim_t: 3
dim_a: 3
dim_v: 3
"""


@pytest.fixture
def files(tmp_path):
    config = tmp_path / "run.yaml"
    config.write_text(RUN_CONFIG, encoding="utf-8")
    spec = tmp_path / "synth.yaml"
    spec.write_text(SYNTH_SPEC, encoding="utf-8")
    return {"config": str(config), "spec": str(spec), "dir": tmp_path}


@pytest.fixture
def corpus_path(files, capsys):
    path = str(files["dir"] / "corpus.json")
    assert main(["synth", "--spec", files["spec"], "--out", path]) == 0
    capsys.readouterr()
    return path


def _csv_rows(path):
    return read_csv_rows(str(path))


def _comment_lines(path):
    with open(path, encoding="utf-8") as f:
        return [line.rstrip("\n") for line in f if line.startswith("#")]


def test_help_exits_cleanly(capsys):
    assert main(["--help"]) == 0
    assert "train" in capsys.readouterr().out
    assert main(["train", "--help"]) == 0
    assert "--ablate" in capsys.readouterr().out


def test_unknown_command_is_a_usage_error():
    assert main(["nonsense"]) == 2


def test_missing_file_exits_with_two(tmp_path, capsys):
    assert main(["eval", str(tmp_path / "absent.json"), str(tmp_path / "absent.smck")]) == 2
    assert "error" in capsys.readouterr().err


def test_invalid_config_exits_with_two(files, corpus_path, capsys):
    bad = files["dir"] / "bad.yaml"
    bad.write_text("d_model: 5\n", encoding="utf-8")
    assert main(["train", corpus_path, "--config", str(bad), "--out", str(files["dir"] / "run")]) == 2
    assert "d_model" in capsys.readouterr().err


def test_synth_writes_corpus_and_spec(files, capsys):
    path = files["dir"] / "synth" / "corpus.json"
    assert main(["synth", "--spec", files["spec"], "--seed", "9", "--out", str(path)]) == 0
    assert capsys.readouterr().out.strip() == str(path)
    document = json.loads(path.read_text(encoding="utf-8"))
    assert len(document["conversations"]) == 8
    spec = json.loads((files["dir"] / "synth" / "corpus.spec.json").read_text(encoding="utf-8"))
    assert spec["seed"] == 9


def test_train_then_eval(files, corpus_path, capsys):
    out_dir = files["dir"] / "run"
    assert main(["train", corpus_path, "--config", files["config"], "--out", str(out_dir)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["checkpoint"] == str(out_dir / "model.smck")
    assert 0.0 <= summary["test_w_f1"] <= 1.0
    for name in ("config.json", "train_log.jsonl", "model.smck", "test_metrics.json"):
        assert (out_dir / name).exists()
    assert json.loads((out_dir / "config.json").read_text(encoding="utf-8"))["d_model"] == 4

    report_path = files["dir"] / "eval.json"
    assert main(["eval", corpus_path, str(out_dir / "model.smck"), "--split", "all",
                 "--out", str(report_path)]) == 0
    assert "W-F1" in capsys.readouterr().out
    report = json.loads(report_path.read_text(encoding="utf-8"))
    assert report["split"] == "all"
    assert sum(report["support"]) == sum(sum(row) for row in report["confusion"])


@pytest.fixture
def trained_checkpoint(files, corpus_path, capsys):
    out_dir = files["dir"] / "run"
    assert main(["train", corpus_path, "--config", files["config"], "--out", str(out_dir)]) == 0
    capsys.readouterr()
    return str(out_dir / "model.smck")


def _eval_report(corpus, checkpoint, out):
    assert main(["eval", str(corpus), checkpoint, "--split", "all", "--out", str(out)]) == 0
    return json.loads(out.read_text(encoding="utf-8"))


def test_eval_maps_speakers_by_name(files, corpus_path, trained_checkpoint, capsys):
    document = json.loads(Path(corpus_path).read_text(encoding="utf-8"))
    document["conversations"].reverse()
    reordered = files["dir"] / "reordered.json"
    reordered.write_text(json.dumps(document), encoding="utf-8")

    original = _eval_report(corpus_path, trained_checkpoint, files["dir"] / "a.json")
    shuffled = _eval_report(reordered, trained_checkpoint, files["dir"] / "b.json")
    assert shuffled == original


def test_eval_rejects_unseen_speaker(files, corpus_path, trained_checkpoint, capsys):
    document = json.loads(Path(corpus_path).read_text(encoding="utf-8"))
    document["conversations"][0]["utterances"][0]["speaker"] = "stranger"
    unseen = files["dir"] / "unseen.json"
    unseen.write_text(json.dumps(document), encoding="utf-8")
    assert main(["eval", str(unseen), trained_checkpoint]) == 2
    assert "stranger" in capsys.readouterr().err


def test_train_with_ablation_flags(files, corpus_path, capsys):
    out_dir = files["dir"] / "ablated"
    assert main(["train", corpus_path, "--config", files["config"], "--ablate", "cl", "--ablate", "se",
                 "--modalities", "t", "--epochs", "1", "--no-deterministic", "--out", str(out_dir)]) == 0
    config = json.loads((out_dir / "config.json").read_text(encoding="utf-8"))
    assert config["deterministic"] is False
    assert config["ablate"] == ["cl", "se"]
    assert config["modalities"] == "t"
    assert config["epochs"] == 1


def test_bench_reports_equivalent_paths(files, capsys):
    out = files["dir"] / "bench.csv"
    assert main(["bench", "--n", "8", "16", "--d", "2", "--repeats", "1", "--out", str(out)]) == 0
    printed = capsys.readouterr().out.splitlines()
    assert printed[0] == "# command=bench"
    assert "n,d,spatial_seconds,spectral_seconds,residual,check" in printed
    rows = _csv_rows(out)
    assert [int(r["n"]) for r in rows] == [8, 16]
    assert all(float(r["residual"]) <= 1e-8 for r in rows)
    assert "# sizes=[8,16]" in _comment_lines(out)
    summary = json.loads((files["dir"] / "bench.summary.json").read_text(encoding="utf-8"))
    assert summary["max_residual"] <= 1e-8
    assert summary["dense_sizes"] == [8, 16]


def test_bench_skips_dense_path_above_cap(files, capsys):
    out = files["dir"] / "bench.csv"
    assert main(["bench", "--n", "8", "16", "32", "--d", "2", "--repeats", "1", "--max-dense-n", "8",
                 "--out", str(out)]) == 0
    rows = _csv_rows(out)
    assert [r["check"] for r in rows] == ["dense", "sampled", "sampled"]
    assert rows[1]["spatial_seconds"] == "nan"
    summary = json.loads((files["dir"] / "bench.summary.json").read_text(encoding="utf-8"))
    assert summary["dense_sizes"] == [8]
    assert summary["frequency_scales_better"] is False


def test_spectrum_dumps_both_bands(files, corpus_path, capsys):
    out = files["dir"] / "spectrum.csv"
    assert main(["spectrum", corpus_path, "--config", files["config"], "--out", str(out)]) == 0
    rows = _csv_rows(out)
    n_nodes = len(rows) // 2
    comments = _comment_lines(out)
    assert "# command=spectrum" in comments
    assert "# d_model=4" in comments
    assert any(line.startswith("# conversation_id=") for line in comments)
    assert n_nodes % 3 == 0
    assert {r["band"] for r in rows} == {"low", "high"}
    assert all(-1e-9 <= float(r["eigenvalue"]) <= 2.0 + 1e-9 for r in rows)


def test_spectrum_rejects_bad_conversation_index(files, corpus_path):
    assert main(["spectrum", corpus_path, "--config", files["config"], "--conversation", "99"]) == 2


def test_smoothing_sweep(files, corpus_path, capsys):
    out = files["dir"] / "smoothing.csv"
    assert main(["smoothing", corpus_path, "--config", files["config"], "--depths", "1", "2",
                 "--out", str(out)]) == 0
    rows = _csv_rows(out)
    assert [(r["stack"], r["depth"]) for r in rows] == [
        ("fourier", "1"), ("fourier", "2"), ("spatial", "1"), ("spatial", "2")]


def test_ablation_table(files, corpus_path, capsys):
    out = files["dir"] / "ablation.csv"
    assert main(["ablation", corpus_path, "--config", files["config"], "--variants", "full", "high",
                 "--seeds", "1", "--epochs", "1", "--out", str(out)]) == 0
    rows = _csv_rows(out)
    assert [(r["variant"], r["seed"]) for r in rows] == [("full", "1"), ("high", "1")]
    comments = _comment_lines(out)
    assert comments == sorted(comments)
    assert "# command=ablation" in comments
    assert '# variants=["full","high"]' in comments
    assert "# window_k=1" in comments


def test_params_count(files, capsys):
    assert main(["params-count", "--config", files["config"], "--dims", "3", "2", "2",
                 "--speakers", "2", "--classes", "3"]) == 0
    payload = json.loads(capsys.readouterr().out)
    config = build_run_config({"window_k": 1, "d_model": 4, "depth": 1, "n_freq_bins": 3, "epochs": 2,
                               "patience": 2, "batch_size": 4, "seed": 3})
    assert payload["total"] == init_params(config, (3, 2, 2), 2, 3).count()
    assert payload["total"] == sum(payload["groups"].values())
    assert set(payload["groups"]) == {"speaker", "text", "audio", "visual", "fgn", "head"}


def test_params_count_needs_dims(files):
    assert main(["params-count", "--config", files["config"]]) == 2


def test_disabled_commands_are_hidden():
    registry = build_registry()
    registry.get("bench").disable()
    parser = build_parser(registry)
    with pytest.raises(SystemExit):
        parser.parse_args(["bench"])
    assert registry.get_names()[0] == "synth"
