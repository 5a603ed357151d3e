"""Corpus bookkeeping: provenance, deterministic splits, transposition augmentation.

Augmentation adds every transposition of each piece that stays inside the
vocal ranges of the untransposed corpus.  All transpositions of one source
share its train/validation assignment so the split never leaks a melody
across sides.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable

import numpy as np

from ..document import chorale_from_document, document_from_chorale
from ..pitch import ACCIDENTAL_OFFSET, Interval, UnspellableNote, candidate_steps
from ..score import Chorale, transpose

TRAIN = "train"
VALIDATION = "validation"
MANIFEST_NAME = "manifest.tsv"
SCORES_DIR = "scores"


class EmptyCorpus(ValueError):
    pass


@dataclass(frozen=True)
class ChoraleRecord:
    chorale: Chorale
    source_id: str
    transposition: Interval
    split: str

    @property
    def name(self) -> str:
        return f"{self.source_id}__{self.transposition.semitones:+d}"


@dataclass(frozen=True)
class Corpus:
    records: tuple[ChoraleRecord, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", tuple(self.records))

    def __len__(self) -> int:
        return len(self.records)

    @property
    def chorales(self) -> list[Chorale]:
        return [r.chorale for r in self.records]

    @property
    def source_ids(self) -> list[str]:
        seen: dict[str, None] = {}
        for record in self.records:
            seen.setdefault(record.source_id, None)
        return list(seen)

    @property
    def encoding_mode(self) -> str:
        if not self.records:
            raise EmptyCorpus("corpus holds no chorales")
        return self.records[0].chorale.encoding_mode

    def split_records(self, split: str) -> list[ChoraleRecord]:
        return [r for r in self.records if r.split == split]

    @property
    def is_untransposed(self) -> bool:
        return all(r.transposition == Interval(0, 0) for r in self.records)


@dataclass(frozen=True)
class VocalRanges:
    """Per-voice admissible MIDI span, taken from the untransposed corpus."""

    low: tuple[int, int, int, int]
    high: tuple[int, int, int, int]

    def __post_init__(self) -> None:
        for lo, hi in zip(self.low, self.high):
            if lo > hi:
                raise ValueError(f"empty range [{lo}, {hi}]")

    @classmethod
    def from_corpus(cls, corpus: Corpus) -> VocalRanges:
        low = [128] * 4
        high = [-1] * 4
        for chorale in corpus.chorales:
            for voice in chorale.voices:
                v = voice.voice_index - 1
                for token in voice.tokens:
                    if token.is_pitch:
                        low[v] = min(low[v], token.midi)
                        high[v] = max(high[v], token.midi)
        if any(h < 0 for h in high):
            raise EmptyCorpus("corpus holds no pitch tokens")
        return cls(tuple(low), tuple(high))

    def admits(self, chorale: Chorale) -> bool:
        for voice in chorale.voices:
            lo, hi = self.low[voice.voice_index - 1], self.high[voice.voice_index - 1]
            for token in voice.tokens:
                if token.is_pitch and not lo <= token.midi <= hi:
                    return False
        return True


def assign_splits(source_ids: Iterable[str], seed: int, train_fraction: float = 0.8) -> dict[str, str]:
    """Deterministic per-source split; the fraction counts sources, since all
    transpositions of a source must land on its side."""
    ordered = sorted(set(source_ids))
    if not ordered:
        return {}
    rng = np.random.default_rng(seed)
    permuted = [ordered[i] for i in rng.permutation(len(ordered))]
    n_train = int(round(train_fraction * len(ordered)))
    n_train = min(max(n_train, 1), len(ordered) - 1) if len(ordered) > 1 else len(ordered)
    return {
        source: (TRAIN if position < n_train else VALIDATION)
        for position, source in enumerate(permuted)
    }


def choose_transposition_interval(chorale: Chorale, semitones: int) -> Interval:
    """Spelling of a semitone shift that minimizes accidental marks.

    Spelled mode counts the sharps/flats the transposed notes would carry
    (ties broken toward fewer flats); MIDI mode, having no spellings, keeps
    the shifted key signature closest to natural (ties toward sharps).
    """
    if semitones == 0:
        return Interval(0, 0)
    best: tuple | None = None
    best_interval: Interval | None = None
    spelled = chorale.encoding_mode == "spelled"
    first_key = chorale.metadata.key_signature[0] if chorale.length else 0

    for steps in candidate_steps(semitones):
        interval = Interval(steps, semitones)
        if spelled:
            try:
                moved = transpose(chorale, interval)
            except UnspellableNote:
                continue
            marks = 0
            flats = 0
            for voice in moved.voices:
                for token in voice.tokens:
                    if token.is_pitch and token.spelling is not None:
                        offset = ACCIDENTAL_OFFSET[token.spelling.accidental]
                        marks += abs(offset)
                        flats += max(0, -offset)
            key = (marks, flats, abs(interval.sharps_delta), steps)
        else:
            target = first_key + interval.sharps_delta
            key = (abs(target), -target, steps)
        if best is None or key < best:
            best = key
            best_interval = interval

    if best_interval is None:
        raise UnspellableNote(f"no spellable interval for a shift of {semitones} semitones")
    return best_interval


def augment(corpus: Corpus, ranges: VocalRanges) -> Corpus:
    """Add every transposition of each chorale that fits the vocal ranges.

    The sweep runs outward from 0 semitones and stops at the first shift that
    fails on each side; the original is kept with a zero shift.
    """
    if not corpus.is_untransposed:
        raise ValueError("augment expects an untransposed corpus")
    augmented: list[ChoraleRecord] = []
    for record in corpus.records:
        shifts: list[tuple[int, Chorale, Interval]] = [(0, record.chorale, Interval(0, 0))]
        for direction in (1, -1):
            k = direction
            while True:
                try:
                    interval = choose_transposition_interval(record.chorale, k)
                    moved = transpose(record.chorale, interval)
                except UnspellableNote:
                    break
                if not ranges.admits(moved):
                    break
                shifts.append((k, moved, interval))
                k += direction
        for k, moved, interval in sorted(shifts):
            augmented.append(replace(record, chorale=moved, transposition=interval))
    return Corpus(tuple(augmented))


def write_manifest(corpus: Corpus) -> str:
    """One record per chorale: source id, transposition steps,semitones, split."""
    lines = ["# choralegen corpus manifest v1\tsource\ttransposition\tsplit"]
    for record in corpus.records:
        t = record.transposition
        lines.append(f"{record.source_id}\t{t.steps},{t.semitones}\t{record.split}")
    return "\n".join(lines) + "\n"


def read_manifest(text: str) -> list[tuple[str, Interval, str]]:
    entries = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValueError(f"manifest line {line_number}: expected 3 tab-separated fields")
        source_id, transposition, split = fields
        steps_text, _, semitones_text = transposition.partition(",")
        if split not in (TRAIN, VALIDATION):
            raise ValueError(f"manifest line {line_number}: unknown split {split!r}")
        entries.append((source_id, Interval(int(steps_text), int(semitones_text)), split))
    return entries


def save_corpus(corpus: Corpus, directory: str | Path) -> None:
    directory = Path(directory)
    scores = directory / SCORES_DIR
    scores.mkdir(parents=True, exist_ok=True)
    ordered = sorted(corpus.records, key=lambda r: (r.source_id, r.transposition.semitones))
    (directory / MANIFEST_NAME).write_text(write_manifest(Corpus(tuple(ordered))))
    for record in ordered:
        path = scores / f"{record.name}.json"
        path.write_text(json.dumps(document_from_chorale(record.chorale), indent=1))


def load_corpus(directory: str | Path) -> Corpus:
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.exists():
        raise FileNotFoundError(f"no {MANIFEST_NAME} in {directory}")
    records = []
    for source_id, interval, split in read_manifest(manifest_path.read_text()):
        name = f"{source_id}__{interval.semitones:+d}"
        path = directory / SCORES_DIR / f"{name}.json"
        chorale = chorale_from_document(json.loads(path.read_text()))
        records.append(ChoraleRecord(chorale, source_id, interval, split))
    if not records:
        raise EmptyCorpus(f"manifest in {directory} lists no chorales")
    return Corpus(tuple(records))
