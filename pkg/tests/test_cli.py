"""Command-line behavior: flows, artifacts, exit codes, reproducibility."""

import json
import os

import pytest

from pathvuln.c2v import read_c2v
from pathvuln.cli import main
from pathvuln.manifest import verify_manifest

from fixtures import SCSI_ABORT, SHR_CC


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """One small synth -> extract -> train flow shared by the read-only tests."""
    root = tmp_path_factory.mktemp("flow")
    corpus = root / "corpus"
    ctx = root / "ctx"
    run_dir = root / "run"
    assert run("synth", "--out", corpus, "--count", 120, "--seed", 3) == 0
    assert run(
        "extract",
        "--train", corpus / "train.jsonl",
        "--valid", corpus / "valid.jsonl",
        "--test", corpus / "test.jsonl",
        "--out", ctx,
    ) == 0
    assert run(
        "train", "--data", ctx, "--out", run_dir,
        "--epochs", 2, "--batch-size", 32, "--embedding-size", 8,
    ) == 0
    return root


def test_extract_artifacts(workspace):
    ctx = workspace / "ctx"
    for name in ("train.c2v", "valid.c2v", "test.c2v",
                 "label_distribution.png", "extract.json"):
        assert (ctx / name).exists(), name
    assert (ctx / "train.c2v").read_text(encoding="utf-8").startswith("#c2v-format 1\n")
    verify_manifest(ctx / "extract.json")


def test_train_artifacts(workspace):
    run_dir = workspace / "run"
    for name in ("model.ckpt", "value_vocab.tsv", "path_vocab.tsv",
                 "metrics.jsonl", "training_curves.png", "train.json"):
        assert (run_dir / name).exists(), name
    records = [
        json.loads(line)
        for line in (run_dir / "metrics.jsonl").read_text(encoding="utf-8").splitlines()
    ]
    assert [r["epoch"] for r in records] == [1, 2]
    assert all(0.0 <= r["valid_f1"] <= 1.0 for r in records)
    verify_manifest(run_dir / "train.json")


def test_evaluate_writes_report_and_figure(workspace, capsys):
    run_dir = workspace / "run"
    code = run("evaluate", "--checkpoint", run_dir / "model.ckpt",
               "--data", workspace / "ctx" / "test.c2v")
    assert code == 0
    out = capsys.readouterr().out
    assert "accuracy:" in out and "%" in out
    report = json.loads((run_dir / "report.json").read_text(encoding="utf-8"))
    metrics = report["metrics"]
    assert metrics["tp"] + metrics["fp"] + metrics["tn"] + metrics["fn"] == 12
    assert 0.0 <= metrics["f1"] <= 1.0
    assert (run_dir / "confusion_matrix.png").exists()


def test_predict_labels_functions(workspace, tmp_path, capsys):
    source = tmp_path / "input.c"
    source.write_text(SCSI_ABORT + "\n" + SHR_CC, encoding="utf-8")
    code = run("predict", source, "--checkpoint", workspace / "run" / "model.ckpt")
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 2
    for line in lines:
        label, q = line.split("\t")
        assert label in ("safe", "vuln")
        assert 0.0 <= float(q) <= 1.0


def test_predict_reports_unscorable_functions(workspace, tmp_path, capsys):
    source = tmp_path / "input.c"
    source.write_text("void broken(void) { }\nint ok(int a) { return a + 1; }\n",
                      encoding="utf-8")
    code = run("predict", source, "--checkpoint", workspace / "run" / "model.ckpt")
    captured = capsys.readouterr()
    assert code == 0
    assert len(captured.out.strip().splitlines()) == 1
    assert "skipped" in captured.err


def test_predict_with_no_scorable_function_fails(workspace, tmp_path, capsys):
    source = tmp_path / "input.c"
    source.write_text("void broken(void) { }\n", encoding="utf-8")
    code = run("predict", source, "--checkpoint", workspace / "run" / "model.ckpt")
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_predict_with_no_functions_is_quiet_success(workspace, tmp_path, capsys):
    source = tmp_path / "input.c"
    source.write_text("int x; /* declarations only */\n", encoding="utf-8")
    code = run("predict", source, "--checkpoint", workspace / "run" / "model.ckpt")
    captured = capsys.readouterr()
    assert code == 0
    assert captured.out == ""
    assert "no function definitions" in captured.err


def test_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as err:
        run("train")  # missing required flags
    assert err.value.code == 1
    with pytest.raises(SystemExit) as err:
        run("no-such-command")
    assert err.value.code == 1
    capsys.readouterr()


def test_bad_flag_values_exit_1(workspace, tmp_path, capsys):
    code = run("train", "--data", workspace / "ctx", "--out", tmp_path,
               "--dropout", "1.5", "--epochs", "1")
    assert code == 1
    assert "dropout" in capsys.readouterr().err


def test_missing_input_exits_2(tmp_path, capsys):
    code = run("extract",
               "--train", tmp_path / "absent.jsonl",
               "--valid", tmp_path / "absent.jsonl",
               "--test", tmp_path / "absent.jsonl",
               "--out", tmp_path / "out")
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_malformed_corpus_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"func": "int f() { return 0; }"}\n', encoding="utf-8")
    code = run("extract", "--train", bad, "--valid", bad, "--test", bad,
               "--out", tmp_path / "out")
    assert code == 2
    assert "target" in capsys.readouterr().err


def test_vocab_mismatch_exits_2(workspace, tmp_path, capsys):
    run_dir = workspace / "run"
    other = tmp_path / "other"
    other.mkdir()
    # train an incompatible model to get foreign vocabularies: a huge
    # min-count empties the tables down to the sentinels
    assert run("train", "--data", workspace / "ctx", "--out", other,
               "--epochs", 1, "--batch-size", 32, "--embedding-size", 8,
               "--min-count", 100000) == 0
    code = run("evaluate", "--checkpoint", run_dir / "model.ckpt",
               "--data", workspace / "ctx" / "test.c2v",
               "--vocab-dir", other)
    assert code == 2
    assert "digest" in capsys.readouterr().err.lower()


def _extract_then_train(corpus, ctx, run_dir, *, workers=1, seed=0):
    assert run(
        "extract",
        "--train", corpus / "train.jsonl",
        "--valid", corpus / "valid.jsonl",
        "--test", corpus / "test.jsonl",
        "--out", ctx, "--workers", workers, "--seed", seed,
    ) == 0
    assert run(
        "train", "--data", ctx, "--out", run_dir,
        "--epochs", 2, "--batch-size", 32, "--embedding-size", 8, "--seed", seed,
    ) == 0


COMPARED = (
    ("ctx", "train.c2v"), ("ctx", "valid.c2v"), ("ctx", "test.c2v"),
    ("run", "model.ckpt"), ("run", "metrics.jsonl"),
    ("run", "value_vocab.tsv"), ("run", "path_vocab.tsv"),
)


def test_repeat_runs_are_byte_identical(tmp_path):
    corpus = tmp_path / "corpus"
    assert run("synth", "--out", corpus, "--count", 80, "--seed", 1) == 0
    for tag in ("a", "b"):
        _extract_then_train(corpus, tmp_path / f"ctx_{tag}", tmp_path / f"run_{tag}")
    for kind, name in COMPARED:
        a = (tmp_path / f"{kind}_a" / name).read_bytes()
        b = (tmp_path / f"{kind}_b" / name).read_bytes()
        assert a == b, f"{kind}/{name} differs between identical runs"


def test_worker_count_does_not_change_outputs(tmp_path):
    corpus = tmp_path / "corpus"
    assert run("synth", "--out", corpus, "--count", 80, "--seed", 2) == 0
    for tag, workers in (("serial", 1), ("pool", 2)):
        assert run(
            "extract",
            "--train", corpus / "train.jsonl",
            "--valid", corpus / "valid.jsonl",
            "--test", corpus / "test.jsonl",
            "--out", tmp_path / f"ctx_{tag}", "--workers", workers,
        ) == 0
    for name in ("train.c2v", "valid.c2v", "test.c2v"):
        assert (tmp_path / "ctx_serial" / name).read_bytes() == \
            (tmp_path / "ctx_pool" / name).read_bytes()


def test_ast_input_mode(tmp_path, capsys):
    from pathvuln.parser import parse_source

    def record(idx, src, target):
        return json.dumps(
            {"idx": idx, "func": parse_source(src).to_json(), "target": target}
        )

    (tmp_path / "train.jsonl").write_text(
        record(0, "int f(int a) { return a + 1; }", 0) + "\n"
        + record(1, "int g(int a) { return a * 2; }", 1) + "\n",
        encoding="utf-8",
    )
    (tmp_path / "valid.jsonl").write_text(
        record(2, "int h(int a) { return a - 3; }", 0) + "\n", encoding="utf-8"
    )
    (tmp_path / "test.jsonl").write_text(
        record(3, "int k(int a) { return a / 2; }", 1) + "\n", encoding="utf-8"
    )
    code = run(
        "extract",
        "--train", tmp_path / "train.jsonl",
        "--valid", tmp_path / "valid.jsonl",
        "--test", tmp_path / "test.jsonl",
        "--out", tmp_path / "ctx", "--ast-input",
    )
    assert code == 0
    bags = read_c2v(tmp_path / "ctx" / "train.c2v")
    assert [b.label for b in bags] == ["safe", "vuln"]
    capsys.readouterr()
