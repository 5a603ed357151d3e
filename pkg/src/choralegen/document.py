"""Score document: the JSON shape of a chorale used by corpus files and the HTTP API.

All arrays are tick-indexed from 0 (array index t holds in-memory tick t+1);
the conversion happens only here, at the serialization boundary.

Schema (version 1):

    {
      "format": "choralegen-score",
      "version": 1,
      "encoding": "midi" | "spelled",
      "length": <int>,
      "voices": [ [token, ...] x4 ],        # soprano, alto, tenor, bass
      "fermata": [bool, ...],
      "subdivision": [int 1..4, ...],
      "key_signature": [int -7..7, ...]
    }

    token = {"kind": "pitch", "label": "F#4" | "66", "midi": 66}
          | {"kind": "hold"}
"""

from __future__ import annotations

import json
from typing import Any

from .score import (
    HOLD,
    Chorale,
    MetadataSeq,
    NoteToken,
    Violation,
    VoiceSeq,
    parse_token_label,
    validate,
)

FORMAT_NAME = "choralegen-score"
FORMAT_VERSION = 1


class DocumentError(ValueError):
    """A score document is malformed or violates chorale invariants."""

    def __init__(self, message: str, violations: list[Violation] | None = None) -> None:
        super().__init__(message)
        self.violations = violations or []


def document_from_chorale(chorale: Chorale) -> dict[str, Any]:
    mode = chorale.encoding_mode
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "encoding": mode,
        "length": chorale.length,
        "voices": [[_token_json(t) for t in voice.tokens] for voice in chorale.voices],
        "fermata": list(chorale.metadata.fermata),
        "subdivision": list(chorale.metadata.subdivision),
        "key_signature": list(chorale.metadata.key_signature),
    }


def chorale_from_document(document: dict[str, Any]) -> Chorale:
    """Parse and validate; raises DocumentError carrying the violation list."""
    if not isinstance(document, dict):
        raise DocumentError("document must be an object")
    if document.get("format") != FORMAT_NAME:
        raise DocumentError(f"unknown document format {document.get('format')!r}")
    if document.get("version") != FORMAT_VERSION:
        raise DocumentError(f"unsupported document version {document.get('version')!r}")
    mode = document.get("encoding")
    if mode not in ("midi", "spelled"):
        raise DocumentError(f"unknown encoding {mode!r}")

    voices_json = document.get("voices")
    if not isinstance(voices_json, list) or len(voices_json) != 4:
        raise DocumentError("voices must be a list of exactly 4 token arrays")
    try:
        voices = tuple(
            VoiceSeq(i + 1, tuple(_token_from_json(t, mode) for t in tokens))
            for i, tokens in enumerate(voices_json)
        )
        metadata = MetadataSeq(
            fermata=tuple(document["fermata"]),
            subdivision=tuple(document["subdivision"]),
            key_signature=tuple(document["key_signature"]),
        )
        chorale = Chorale(voices, metadata)
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"malformed document: {exc}") from exc

    if document.get("length") != chorale.length:
        raise DocumentError("declared length does not match voice arrays")
    violations = validate(chorale)
    if violations:
        raise DocumentError("document violates chorale invariants", violations)
    return chorale


def document_bytes(document: dict[str, Any]) -> bytes:
    """Canonical encoding: key-sorted, minimal separators.  Byte-stable for
    identical documents, which the session replay check relies on."""
    return json.dumps(document, sort_keys=True, separators=(",", ":")).encode("utf-8")


def _token_json(token: NoteToken) -> dict[str, Any]:
    if token.is_hold:
        return {"kind": "hold"}
    if token.is_pad:
        raise DocumentError("pad tokens do not belong in a score document")
    return {"kind": "pitch", "label": token.label, "midi": token.midi}


def _token_from_json(data: Any, mode: str) -> NoteToken:
    if not isinstance(data, dict):
        raise DocumentError(f"token must be an object, got {type(data).__name__}")
    kind = data.get("kind")
    if kind == "hold":
        return HOLD
    if kind == "pitch":
        token = parse_token_label(str(data.get("label")), mode)
        declared = data.get("midi")
        if declared is not None and declared != token.midi:
            raise DocumentError(f"token {data.get('label')!r} declares midi {declared}, expected {token.midi}")
        return token
    raise DocumentError(f"unknown token kind {kind!r}")
