"""Regenerate the bundled mini corpus: 24 small four-voice scores.

Deterministic. Pieces are simple diatonic SATB chord progressions with
phrase-final fermatas, varied keys, lengths and inner-voice passing tones,
written through the package's own MusicXML exporter and re-parsed as a
self-check.  Run from the repository root:

    python3 tools/make_mini_corpus.py
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from choralegen.ingest.musicxml import export_musicxml, parse_musicxml
from choralegen.pitch import LETTERS, SpelledPitch
from choralegen.score import (
    HOLD,
    Chorale,
    MetadataSeq,
    VoiceSeq,
    spelled_pitch,
    subdivision_for,
    validate,
)

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "choralegen" / "data" / "mini_corpus"

RANGES = {1: (60, 81), 2: (53, 74), 3: (48, 69), 4: (36, 60)}

MAJOR_TONIC = {0: "C", 1: "G", 2: "D", 3: "A", 4: "E", -1: "F", -2: "Bb", -3: "Eb", -4: "Ab"}
SHARP_ORDER = "FCGDAEB"
FLAT_ORDER = "BEADGCF"

PROGRESSIONS = [
    [1, 4, 5, 1, 6, 4, 5, 1],
    [1, 5, 6, 4, 1, 4, 5, 1],
    [1, 6, 2, 5, 1, 4, 5, 1],
    [1, 4, 1, 5, 6, 2, 5, 1],
    [1, 2, 5, 1, 4, 1, 5, 1],
    [1, 5, 4, 1, 2, 5, 1, 1],
]


def major_scale(fifths: int) -> list[tuple[str, str]]:
    """Seven (letter, accidental) pairs of the major scale with that signature."""
    tonic = MAJOR_TONIC[fifths]
    tonic_letter, tonic_acc = tonic[0], tonic[1:]
    sharps = set(SHARP_ORDER[: max(fifths, 0)])
    flats = set(FLAT_ORDER[: max(-fifths, 0)])
    start = LETTERS.index(tonic_letter)
    scale = []
    for step in range(7):
        letter = LETTERS[(start + step) % 7]
        acc = "#" if letter in sharps else ("b" if letter in flats else "")
        scale.append((letter, acc))
    assert scale[0] == (tonic_letter, tonic_acc)
    return scale


def pitch_at(scale: list[tuple[str, str]], degree0: int, octave: int) -> SpelledPitch:
    letter, acc = scale[degree0 % 7]
    # Octave number increments when the letter sequence wraps past B.
    base_letter_index = LETTERS.index(scale[0][0])
    wraps = (base_letter_index + (degree0 % 7)) // 7
    return SpelledPitch(letter, acc, octave + wraps + degree0 // 7)


def chord_degrees(degree: int) -> list[int]:
    root = degree - 1
    return [root, root + 2, root + 4]


def nearest_choice(candidates: list[SpelledPitch], previous: int | None, low: int, high: int,
                   rng: np.random.Generator) -> SpelledPitch:
    pool = [c for c in candidates if low <= c.midi <= high]
    if not pool:
        pool = candidates
    if previous is None:
        return pool[int(rng.integers(len(pool)))]
    best = min(abs(c.midi - previous) for c in pool)
    nearest = [c for c in pool if abs(c.midi - previous) <= best + 1]
    return nearest[int(rng.integers(len(nearest)))]


def chord_candidates(scale, degree: int, low: int, high: int) -> list[SpelledPitch]:
    out = []
    for octave in range(1, 7):
        for d in chord_degrees(degree):
            p = pitch_at(scale, d, octave)
            if low - 3 <= p.midi <= high + 3:
                out.append(p)
    return out


def make_piece(index: int) -> Chorale:
    rng = np.random.default_rng([20_240_601, index])
    fifths = list(MAJOR_TONIC)[index % len(MAJOR_TONIC)]
    scale = major_scale(fifths)
    progression = list(PROGRESSIONS[index % len(PROGRESSIONS)])
    n_phrases = 2 + index % 3  # 2..4 phrases of two bars
    degrees: list[int] = []
    for phrase in range(n_phrases):
        degrees.extend(progression if phrase % 2 == 0 else progression[::-1][1:] + [1])

    rows: dict[int, list] = {1: [], 2: [], 3: [], 4: []}
    fermata: list[bool] = []
    previous: dict[int, int | None] = {1: None, 2: None, 3: None, 4: None}

    for position, degree in enumerate(degrees):
        phrase_final = position % 8 == 7
        ticks = 8 if phrase_final else 4
        if position == len(degrees) - 1:
            ticks = 16
        chosen: dict[int, SpelledPitch] = {}
        root = pitch_at(scale, chord_degrees(degree)[0], 2)
        bass_options = [root, pitch_at(scale, chord_degrees(degree)[0], 3)]
        chosen[4] = nearest_choice(bass_options, previous[4], *RANGES[4], rng)
        for voice in (3, 2, 1):
            low, high = RANGES[voice]
            floor = chosen[voice + 1].midi if voice + 1 in chosen else low
            candidates = [c for c in chord_candidates(scale, degree, low, high) if c.midi >= floor]
            chosen[voice] = nearest_choice(candidates or chord_candidates(scale, degree, low, high),
                                           previous[voice], low, high, rng)
        for voice in (1, 2, 3, 4):
            tone = chosen[voice]
            split = (
                not phrase_final
                and ticks == 4
                and voice in (2, 3)
                and previous[voice] is not None
                and rng.random() < 0.25
            )
            if split and abs(tone.midi - previous[voice]) in (3, 4):
                # Approach by a passing scale tone for the first eighth.
                middle = nearest_choice(
                    [pitch_at(scale, d, o) for d in range(7) for o in (2, 3, 4, 5)
                     if min(tone.midi, previous[voice]) < pitch_at(scale, d, o).midi < max(tone.midi, previous[voice])],
                    previous[voice], *RANGES[voice], rng,
                ) if min(tone.midi, previous[voice]) + 1 < max(tone.midi, previous[voice]) else None
                if middle is not None:
                    rows[voice] += [spelled_pitch(middle), HOLD, spelled_pitch(tone), HOLD]
                else:
                    rows[voice] += [spelled_pitch(tone)] + [HOLD] * 3
            else:
                rows[voice] += [spelled_pitch(tone)] + [HOLD] * (ticks - 1)
            previous[voice] = tone.midi
        fermata.extend([phrase_final or position == len(degrees) - 1] * ticks)

    length = len(rows[1])
    metadata = MetadataSeq(
        fermata=tuple(fermata),
        subdivision=tuple(subdivision_for(t) for t in range(1, length + 1)),
        key_signature=tuple([fifths] * length),
    )
    return Chorale(tuple(VoiceSeq(v, tuple(rows[v])) for v in (1, 2, 3, 4)), metadata)


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for stale in OUT_DIR.glob("*.musicxml"):
        stale.unlink()
    for index in range(24):
        piece = make_piece(index)
        problems = validate(piece)
        assert not problems, (index, problems[:4])
        data = export_musicxml(piece)
        assert parse_musicxml(data) == piece, f"piece {index} does not round-trip"
        path = OUT_DIR / f"chorale_{index:02d}.musicxml"
        path.write_bytes(data)
        print(f"wrote {path.name}: {piece.length} ticks, key {piece.metadata.key_signature[0]:+d}")


if __name__ == "__main__":
    main()
