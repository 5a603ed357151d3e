"""Spelled-pitch arithmetic: letters, accidentals, octaves and diatonic intervals.

A spelled pitch distinguishes enharmonic notes (F#4 vs Gb4) that share a MIDI
number.  Transposition works on (letter, accidental, octave) triples so the
spelling of every note moves consistently with the interval.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

LETTERS = "CDEFGAB"

# Semitone position of each natural letter within an octave (C = 0).
LETTER_SEMITONE = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}

ACCIDENTAL_OFFSET = {"bb": -2, "b": -1, "": 0, "#": 1, "##": 2}
_OFFSET_ACCIDENTAL = {v: k for k, v in ACCIDENTAL_OFFSET.items()}

_PITCH_RE = re.compile(r"^([A-G])(bb|b|##|#|)(-?\d+)$")


class UnspellableNote(ValueError):
    """The transposition target needs an accidental beyond double sharp/flat,
    or a pitch outside the MIDI range."""


@dataclass(frozen=True)
class SpelledPitch:
    """A note name in scientific pitch notation, e.g. F#4 (letter F, '#', octave 4)."""

    letter: str
    accidental: str
    octave: int

    def __post_init__(self) -> None:
        if self.letter not in LETTER_SEMITONE:
            raise ValueError(f"bad letter {self.letter!r}")
        if self.accidental not in ACCIDENTAL_OFFSET:
            raise ValueError(f"bad accidental {self.accidental!r}")

    @property
    def midi(self) -> int:
        return (self.octave + 1) * 12 + LETTER_SEMITONE[self.letter] + ACCIDENTAL_OFFSET[self.accidental]

    @classmethod
    def parse(cls, text: str) -> SpelledPitch:
        m = _PITCH_RE.match(text)
        if m is None:
            raise ValueError(f"cannot parse pitch name {text!r}")
        return cls(m.group(1), m.group(2), int(m.group(3)))

    def __str__(self) -> str:
        return f"{self.letter}{self.accidental}{self.octave}"


@dataclass(frozen=True)
class Interval:
    """A signed diatonic interval: letter steps plus exact semitone distance.

    An ascending major second is Interval(1, 2); a descending perfect fifth is
    Interval(-4, -7).  The pair determines both the new letter and the new
    accidental of any transposed pitch.
    """

    steps: int
    semitones: int

    def __neg__(self) -> Interval:
        return Interval(-self.steps, -self.semitones)

    @property
    def sharps_delta(self) -> int:
        """How many sharps the interval adds to a key signature.

        Moving up a perfect fifth (+4 steps, +7 semitones) adds one sharp;
        the general rule is 7*semitones - 12*steps.
        """
        return 7 * self.semitones - 12 * self.steps


UNISON = Interval(0, 0)


def transpose_spelled(pitch: SpelledPitch, interval: Interval) -> SpelledPitch:
    """Move a spelled pitch by a diatonic interval, preserving consistent spelling.

    Raises UnspellableNote when the result would need more than a double
    accidental or leave the MIDI range.
    """
    degree = LETTERS.index(pitch.letter) + interval.steps
    letter = LETTERS[degree % 7]
    octave = pitch.octave + degree // 7
    target = pitch.midi + interval.semitones
    offset = target - ((octave + 1) * 12 + LETTER_SEMITONE[letter])
    if offset not in _OFFSET_ACCIDENTAL:
        raise UnspellableNote(f"{pitch} moved by {interval} needs accidental offset {offset}")
    if not 0 <= target <= 127:
        raise UnspellableNote(f"{pitch} moved by {interval} leaves the MIDI range")
    return SpelledPitch(letter, _OFFSET_ACCIDENTAL[offset], octave)


def candidate_steps(semitones: int) -> list[int]:
    """Plausible diatonic step counts for a semitone shift, nearest first.

    A shift of k semitones is nominally 7k/12 letter steps; the true best
    spelling for a given piece is one of the neighbours of that value.
    """
    base = round(7 * semitones / 12)
    return [base, base - 1, base + 1]


_SHARP_NAMES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")
_FLAT_NAMES = ("C", "Db", "D", "Eb", "E", "F", "Gb", "G", "Ab", "A", "Bb", "B")


def spell_midi(midi: int, prefer_flats: bool = False) -> SpelledPitch:
    """Default spelling for a bare MIDI number (used when no spelling is known)."""
    names = _FLAT_NAMES if prefer_flats else _SHARP_NAMES
    name = names[midi % 12]
    octave = midi // 12 - 1
    letter, accidental = name[0], name[1:]
    return SpelledPitch(letter, accidental, octave)
