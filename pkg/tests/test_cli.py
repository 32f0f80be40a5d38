from __future__ import annotations

import json
from pathlib import Path

import pytest

from vlf.cli import main
from vlf.corpus import seed_corpus
from vlf.embedder import EmbedderConfig
from vlf.fusion import init_model
from vlf.train import save_model


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli_corpus")
    seed_corpus(out)
    return out


@pytest.fixture(scope="module")
def model_path(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli_model") / "model.vlf.json"
    save_model(init_model(4, EmbedderConfig(seed=0)), out)
    return str(out)


def test_parse_writes_documents(tmp_path, corpus_dir, capsys):
    target = sorted(corpus_dir.glob("python_*.py"))[0]
    rc = main(["parse", str(target), "--out", str(tmp_path)])
    assert rc == 0
    written = list(tmp_path.glob("*.uast.json"))
    assert len(written) == 1
    payload = json.loads(written[0].read_text())
    assert payload["language"] == "python"


def test_seed_corpus_and_split(tmp_path, capsys):
    rc = main(["seed-corpus", "--out", str(tmp_path / "corpus")])
    assert rc == 0
    assert (tmp_path / "corpus" / "labels.json").exists()
    rc = main(["split", "--data", str(tmp_path / "corpus"), "--seed", "3"])
    assert rc == 0
    for split_name in ("train", "val", "test"):
        assert (tmp_path / "corpus" / f"split_{split_name}.txt").exists()


def test_detect_emits_jsonl(model_path, corpus_dir, capsys):
    target = sorted(corpus_dir.glob("python_*.py"))[0]
    rc = main(["detect", str(target), "--model", model_path])
    assert rc == 0
    line = capsys.readouterr().out.strip().splitlines()[-1]
    payload = json.loads(line)
    assert set(payload) == {"path", "flag", "prob", "alpha_g", "alpha_l", "hash"}


def test_validate_mock(model_path, corpus_dir, capsys):
    target = sorted(corpus_dir.glob("python_vuln_*.py"))[0]
    rc = main(["validate", str(target), "--driver", "mock", "--seed", "2"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert payload["verdict"]["kind"] in ("Exploited", "NotExploited", "Inconclusive")


def test_lifecycle_and_report(tmp_path, model_path, corpus_dir, capsys):
    config = {
        "model_path": model_path,
        "run_dir": str(tmp_path / "run"),
        "driver_kind": "mock",
        "seed": 9,
    }
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config))
    inputs = [str(p) for p in sorted(corpus_dir.glob("python_*.py"))[:4]]
    rc = main(["lifecycle", *inputs, "--config", str(config_path)])
    assert rc == 0
    assert (tmp_path / "run" / "manifest.json").exists()
    capsys.readouterr()  # drop lifecycle output before capturing the report

    rc = main(["report", "--run-dir", str(tmp_path / "run"), "--labels", str(corpus_dir / "labels.json")])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert "total_pipeline_failure" in report
