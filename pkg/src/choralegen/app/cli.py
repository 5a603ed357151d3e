"""Command-line entry points: ingest, train, sample, reharmonize, diagnose, serve."""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from ..ingest.corpus import (
    ChoraleRecord,
    Corpus,
    VocalRanges,
    assign_splits,
    augment,
    load_corpus,
    save_corpus,
)
from ..ingest.keys import estimate_key_signatures
from ..ingest.midi import export_midi
from ..ingest.musicxml import ScoreInputError, export_musicxml, parse_melody, parse_musicxml
from ..models.serialize import load_model_set, save_model_set
from ..models.training import TrainConfig, train
from ..pitch import Interval
from ..sampler import ConstraintSet, SamplerConfig, run
from ..score import MetadataSeq, strip_spelling, validate

REFERENCE_SOURCES = 352
REFERENCE_AUGMENTED = 2503
REFERENCE_PITCH_COUNTS = (21, 21, 21, 28)


def fail(error: Exception) -> None:
    """Machine-readable error record on stderr, nonzero exit."""
    record = {"error": type(error).__name__, "message": str(error)}
    click.echo(json.dumps(record), err=True)
    sys.exit(1)


@click.group()
def main() -> None:
    """Four-part chorale generation: learn conditional models, then steer
    Gibbs-style resampling with constraints."""


@main.command("ingest")
@click.option("--in", "in_dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--encoding",
    type=click.Choice(["spelled", "midi"]),
    default="spelled",
    show_default=True,
    help="Corpus-wide note encoding; models trained on it inherit the mode.",
)
def ingest_command(in_dir: str, out_dir: str, seed: int, encoding: str) -> None:
    """Parse MusicXML scores, estimate keys, split, augment, write a corpus."""
    try:
        paths = sorted(
            p for p in Path(in_dir).iterdir() if p.suffix.lower() in (".musicxml", ".xml")
        )
        if not paths:
            raise FileNotFoundError(f"no .musicxml/.xml files in {in_dir}")
        chorales = {}
        rejected: list[tuple[str, str]] = []
        for path in paths:
            try:
                chorale = parse_musicxml(path.read_bytes())
            except ScoreInputError as exc:
                rejected.append((path.name, f"{type(exc).__name__}: {exc}"))
                continue
            chorale = chorale.with_metadata(
                chorale.metadata.with_key_signature(estimate_key_signatures(chorale))
            )
            if encoding == "midi":
                chorale = strip_spelling(chorale)
            chorales[path.stem] = chorale

        if not chorales:
            raise ValueError("every input file was rejected")
        splits = assign_splits(chorales.keys(), seed=seed)
        records = tuple(
            ChoraleRecord(chorale, source_id, Interval(0, 0), splits[source_id])
            for source_id, chorale in sorted(chorales.items())
        )
        corpus = Corpus(records)
        ranges = VocalRanges.from_corpus(corpus)
        augmented = augment(corpus, ranges)
        save_corpus(augmented, out_dir)
    except Exception as exc:  # noqa: BLE001 - single reporting point
        fail(exc)
        return

    pitch_counts = tuple(
        len({t for r in corpus.records for t in r.chorale.voice(v).tokens if t.is_pitch})
        for v in range(1, 5)
    )
    for name, reason in rejected:
        click.echo(f"rejected\t{name}\t{reason}")
    click.echo(f"sources kept: {len(chorales)} (Bach chorale reference: {REFERENCE_SOURCES})")
    click.echo(
        f"chorales after augmentation: {len(augmented)} (Bach chorale reference: {REFERENCE_AUGMENTED})"
    )
    click.echo(
        f"per-voice pitch counts: {pitch_counts} (Bach chorale reference: {REFERENCE_PITCH_COUNTS})"
    )
    click.echo(f"vocal ranges: low {ranges.low}, high {ranges.high}")
    click.echo(f"corpus written to {out_dir}")


@main.command("train")
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--model", "kind", type=click.Choice(["maxent", "mlp"]), required=True)
@click.option("--out", "out_file", type=click.Path(dir_okay=False), required=True)
@click.option("--delta-t", type=int, default=16, show_default=True)
@click.option("--epochs", type=int, default=20, show_default=True)
@click.option("--lr", "learning_rate", type=float, default=0.1, show_default=True)
@click.option("--batch-size", type=int, default=32, show_default=True)
@click.option("--momentum", type=float, default=0.9, show_default=True)
@click.option("--hidden", "hidden_size", type=int, default=500, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def train_command(
    corpus_dir: str,
    kind: str,
    out_file: str,
    delta_t: int,
    epochs: int,
    learning_rate: float,
    batch_size: int,
    momentum: float,
    hidden_size: int,
    seed: int,
) -> None:
    """Fit the four per-voice conditional models on a corpus."""
    try:
        corpus = load_corpus(corpus_dir)
        config = TrainConfig(
            kind=kind,
            delta_t=delta_t,
            epochs=epochs,
            learning_rate=learning_rate,
            batch_size=batch_size,
            momentum=momentum,
            hidden_size=hidden_size,
            seed=seed,
        )
        model_set, report = train(corpus, config)
        Path(out_file).write_bytes(save_model_set(model_set))
        report_path = Path(out_file).with_suffix(Path(out_file).suffix + ".report.json")
        report_path.write_text(json.dumps(report.to_dict(), indent=1))
    except Exception as exc:  # noqa: BLE001
        fail(exc)
        return

    for voice_index in range(1, 5):
        bar = float(np.log(report.vocab_sizes[voice_index - 1]))
        final = report.last_val_cross_entropy(voice_index) if report.epochs else bar
        click.echo(
            f"voice {voice_index}: validation cross-entropy {final:.4f} nats"
            f" (uniform baseline {bar:.4f})"
        )
    click.echo(f"model written to {out_file}; report to {report_path}")


def _write_score(chorale, out_file: str) -> tuple[Path, Path]:
    base = Path(out_file)
    if base.suffix.lower() in (".musicxml", ".xml", ".mid", ".midi"):
        base = base.with_suffix("")
    musicxml_path = base.with_suffix(".musicxml")
    midi_path = base.with_suffix(".mid")
    musicxml_path.parent.mkdir(parents=True, exist_ok=True)
    musicxml_path.write_bytes(export_musicxml(chorale))
    midi_path.write_bytes(export_midi(chorale))
    return musicxml_path, midi_path


@main.command("sample")
@click.option("--model", "model_file", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--length", type=int, required=True, help="Score length in sixteenth ticks.")
@click.option("--out", "out_file", type=click.Path(dir_okay=False), required=True)
@click.option("--seed", type=int, default=None)
@click.option("--iterations", type=int, default=None, help="Update events; default 100 per free cell.")
@click.option("--init", "init_mode", type=click.Choice(["uniform", "marginal"]), default="marginal",
              show_default=True)
def sample_command(
    model_file: str, length: int, out_file: str, seed: int | None, iterations: int | None, init_mode: str
) -> None:
    """Generate a chorale from scratch."""
    try:
        model_set = load_model_set(Path(model_file).read_bytes())
        resolved_seed = seed if seed is not None else int.from_bytes(os.urandom(6), "big")
        config = SamplerConfig(max_iterations=iterations, init=init_mode, seed=resolved_seed)
        chorale = run(model_set, MetadataSeq.default(length), config=config)
        problems = validate(chorale, model_set.vocabularies)
        if problems:
            raise RuntimeError(f"generated score failed validation: {problems[:5]}")
        musicxml_path, midi_path = _write_score(chorale, out_file)
    except Exception as exc:  # noqa: BLE001
        fail(exc)
        return
    click.echo(f"seed: {resolved_seed}")
    click.echo(f"wrote {musicxml_path} and {midi_path}")


@main.command("reharmonize")
@click.option("--model", "model_file", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--melody", "melody_file", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", "out_file", type=click.Path(dir_okay=False), required=True)
@click.option("--seed", type=int, default=None)
@click.option("--iterations", type=int, default=None)
def reharmonize_command(
    model_file: str, melody_file: str, out_file: str, seed: int | None, iterations: int | None
) -> None:
    """Keep the soprano of a score, regenerate alto, tenor and bass."""
    try:
        model_set = load_model_set(Path(model_file).read_bytes())
        melody = parse_melody(Path(melody_file).read_bytes())
        melody = melody.with_metadata(
            melody.metadata.with_key_signature(estimate_key_signatures(melody))
        )
        if model_set.encoding_mode == "midi":
            melody = strip_spelling(melody)
        stray = [
            v for v in validate(melody, model_set.vocabularies)
            if v.rule == "token outside vocabulary" and v.voice == 1
        ]
        if stray:
            raise ValueError(f"melody uses notes outside the model's soprano range: {stray[:5]}")
        frozen = [(1, t) for t in range(1, melody.length + 1)]
        resolved_seed = seed if seed is not None else int.from_bytes(os.urandom(6), "big")
        config = SamplerConfig(max_iterations=iterations, init="marginal", seed=resolved_seed)
        chorale = run(
            model_set, melody.metadata, ConstraintSet(frozen=frozen), config, seed_chorale=melody
        )
        assert chorale.voice(1) == melody.voice(1)
        musicxml_path, midi_path = _write_score(chorale, out_file)
    except Exception as exc:  # noqa: BLE001
        fail(exc)
        return
    click.echo(f"seed: {resolved_seed}")
    click.echo(f"wrote {musicxml_path} and {midi_path}")


@main.command("diagnose")
@click.option("--suite", "suites", multiple=True, help="Subset of suites; default all.")
def diagnose_command(suites: tuple[str, ...]) -> None:
    """Run the verification suites; nonzero exit on any failed check."""
    from ..diagnostics import run_suites

    try:
        records = run_suites(list(suites) or None)
    except Exception as exc:  # noqa: BLE001
        fail(exc)
        return
    failures = 0
    for record in records:
        click.echo(record.format())
        failures += 0 if record.passed else 1
    if failures:
        click.echo(f"{failures} check(s) failed", err=True)
        sys.exit(1)
    click.echo(f"all {len(records)} checks passed")


@main.command("serve")
@click.option("--model", "model_file", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", type=str, default="127.0.0.1", show_default=True)
@click.option("--iteration-cap", type=int, default=200_000, show_default=True)
def serve_command(model_file: str, port: int, host: str, iteration_cap: int) -> None:
    """Start the HTTP composition service."""
    import uvicorn

    from .service import create_app

    try:
        model_set = load_model_set(Path(model_file).read_bytes())
    except Exception as exc:  # noqa: BLE001
        fail(exc)
        return
    uvicorn.run(create_app(model_set, iteration_cap=iteration_cap), host=host, port=port)


if __name__ == "__main__":
    main()
