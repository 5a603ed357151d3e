"""Bundled example scores: a 24-piece mini corpus of four-voice MusicXML files."""

from __future__ import annotations

from pathlib import Path

MINI_CORPUS_DIR = Path(__file__).resolve().parent / "mini_corpus"


def mini_corpus_paths() -> list[Path]:
    return sorted(MINI_CORPUS_DIR.glob("*.musicxml"))
