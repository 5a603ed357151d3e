from __future__ import annotations

import json
import shutil
from pathlib import Path

import pytest
from click.testing import CliRunner

from choralegen.app.cli import main
from choralegen.data import mini_corpus_paths
from choralegen.ingest.musicxml import parse_melody, parse_musicxml


@pytest.fixture(scope="module")
def workspace(tmp_path_factory) -> dict[str, Path]:
    """Shared ingest + train artifacts for the command tests."""
    root = tmp_path_factory.mktemp("cli")
    scores = root / "scores"
    scores.mkdir()
    for path in mini_corpus_paths()[:4]:
        shutil.copy(path, scores / path.name)
    runner = CliRunner()

    corpus_dir = root / "corpus"
    result = runner.invoke(
        main, ["ingest", "--in", str(scores), "--out", str(corpus_dir), "--seed", "1"]
    )
    assert result.exit_code == 0, result.output

    model_file = root / "model.bin"
    result = runner.invoke(
        main,
        [
            "train", "--corpus", str(corpus_dir), "--model", "maxent",
            "--out", str(model_file), "--delta-t", "2", "--epochs", "1", "--seed", "0",
        ],
    )
    assert result.exit_code == 0, result.output
    return {"root": root, "scores": scores, "corpus": corpus_dir, "model": model_file}


def test_ingest_writes_manifest_and_report(workspace) -> None:
    manifest = (workspace["corpus"] / "manifest.tsv").read_text()
    assert "train" in manifest and "validation" in manifest
    assert (workspace["corpus"] / "scores").is_dir()


def test_ingest_reports_reference_counts(workspace) -> None:
    runner = CliRunner()
    out_dir = workspace["root"] / "corpus2"
    result = runner.invoke(
        main, ["ingest", "--in", str(workspace["scores"]), "--out", str(out_dir), "--seed", "1"]
    )
    assert result.exit_code == 0
    assert "sources kept: 4" in result.output
    assert "352" in result.output and "2503" in result.output
    assert "(21, 21, 21, 28)" in result.output


def test_train_writes_model_and_report(workspace) -> None:
    assert workspace["model"].exists()
    report = json.loads((workspace["root"] / "model.bin.report.json").read_text())
    assert report["config"]["kind"] == "maxent"
    assert len(report["epochs"]) == 1


def test_sample_emits_valid_score_of_requested_length(workspace) -> None:
    runner = CliRunner()
    out = workspace["root"] / "sample_out"
    result = runner.invoke(
        main,
        [
            "sample", "--model", str(workspace["model"]), "--length", "64",
            "--out", str(out), "--seed", "4", "--iterations", "2000",
        ],
    )
    assert result.exit_code == 0, result.output
    musicxml = out.with_suffix(".musicxml")
    midi = out.with_suffix(".mid")
    assert musicxml.exists() and midi.exists()
    chorale = parse_musicxml(musicxml.read_bytes())
    assert chorale.length == 64
    assert midi.read_bytes()[:4] == b"MThd"


def test_sample_deterministic_given_seed(workspace) -> None:
    runner = CliRunner()
    outs = []
    for n in (1, 2):
        out = workspace["root"] / f"det{n}"
        result = runner.invoke(
            main,
            [
                "sample", "--model", str(workspace["model"]), "--length", "32",
                "--out", str(out), "--seed", "7", "--iterations", "500",
            ],
        )
        assert result.exit_code == 0, result.output
        outs.append(out.with_suffix(".musicxml").read_bytes())
    assert outs[0] == outs[1]


def test_reharmonize_keeps_melody_tokens(workspace) -> None:
    runner = CliRunner()
    melody_file = next(iter(sorted(workspace["scores"].glob("*.musicxml"))))
    out = workspace["root"] / "reharm_out"
    result = runner.invoke(
        main,
        [
            "reharmonize", "--model", str(workspace["model"]), "--melody", str(melody_file),
            "--out", str(out), "--seed", "3", "--iterations", "1000",
        ],
    )
    assert result.exit_code == 0, result.output
    melody = parse_melody(melody_file.read_bytes())
    produced = parse_musicxml(out.with_suffix(".musicxml").read_bytes())
    assert produced.voice(1).tokens == melody.voice(1).tokens


def test_diagnose_representation_suite(workspace) -> None:
    runner = CliRunner()
    result = runner.invoke(main, ["diagnose", "--suite", "representation"])
    assert result.exit_code == 0, result.output
    lines = [line for line in result.output.splitlines() if "\t" in line]
    assert len(lines) == 5
    assert all("PASS" in line for line in lines)


def test_errors_are_machine_readable(workspace) -> None:
    runner = CliRunner()
    empty = workspace["root"] / "empty_corpus"
    empty.mkdir(exist_ok=True)
    result = runner.invoke(
        main, ["train", "--corpus", str(empty), "--model", "maxent",
               "--out", str(workspace["root"] / "x.bin")],
    )
    assert result.exit_code == 1
    record = json.loads(result.stderr.strip().splitlines()[-1])
    assert record["error"] == "FileNotFoundError"
    assert "manifest" in record["message"]
