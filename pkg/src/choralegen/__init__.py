"""Steerable four-part chorale generation.

Learns per-voice conditional note distributions from four-voice scores and
generates or regenerates arbitrary score regions under user constraints by
Gibbs-style resampling of one cell at a time.
"""

from .pitch import Interval, SpelledPitch, UnspellableNote
from .score import (
    Chorale,
    MetadataSeq,
    NoteToken,
    Violation,
    VoiceSeq,
    Vocabulary,
    build_vocabularies,
    midi_pitch,
    spelled_pitch,
    subdivision_for,
    to_piano_roll,
    transpose,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "Chorale",
    "Interval",
    "MetadataSeq",
    "NoteToken",
    "SpelledPitch",
    "UnspellableNote",
    "Violation",
    "VoiceSeq",
    "Vocabulary",
    "build_vocabularies",
    "midi_pitch",
    "spelled_pitch",
    "subdivision_for",
    "to_piano_roll",
    "transpose",
    "validate",
]
