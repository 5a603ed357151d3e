"""Corpus ingestion: MusicXML parsing, MIDI/MusicXML export, key estimation,
transposition augmentation and train/validation bookkeeping."""

from .corpus import (
    ChoraleRecord,
    Corpus,
    VocalRanges,
    assign_splits,
    augment,
    choose_transposition_interval,
    load_corpus,
    read_manifest,
    save_corpus,
    write_manifest,
)
from .keys import estimate_key_signatures
from .midi import export_midi
from .musicxml import (
    MalformedInput,
    NotFourVoices,
    ScoreInputError,
    UnsupportedFeature,
    UnsupportedSubdivision,
    VoiceDivision,
    export_musicxml,
    parse_melody,
    parse_musicxml,
)

__all__ = [
    "ChoraleRecord",
    "Corpus",
    "MalformedInput",
    "NotFourVoices",
    "ScoreInputError",
    "UnsupportedFeature",
    "UnsupportedSubdivision",
    "VocalRanges",
    "VoiceDivision",
    "assign_splits",
    "augment",
    "choose_transposition_interval",
    "estimate_key_signatures",
    "export_midi",
    "export_musicxml",
    "load_corpus",
    "parse_melody",
    "parse_musicxml",
    "read_manifest",
    "save_corpus",
    "write_manifest",
]
