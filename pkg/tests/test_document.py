from __future__ import annotations

import json

import pytest

from choralegen.document import (
    DocumentError,
    chorale_from_document,
    document_bytes,
    document_from_chorale,
)

from helpers import block_chorale, make_chorale


def fixture():
    return block_chorale(
        [["C5", "D5", "E5", "C5"], ["G4", "F4", "G4", "G4"], ["E4", "D4", "C4", "E4"], ["C3", "D3", "C3", "C3"]],
        spelled=True,
    )


def test_round_trip() -> None:
    chorale = fixture()
    assert chorale_from_document(document_from_chorale(chorale)) == chorale


def test_document_shape() -> None:
    doc = document_from_chorale(fixture())
    assert doc["format"] == "choralegen-score"
    assert doc["version"] == 1
    assert doc["encoding"] == "spelled"
    assert doc["length"] == 16
    assert len(doc["voices"]) == 4
    assert doc["voices"][0][0] == {"kind": "pitch", "label": "C5", "midi": 72}
    assert doc["voices"][0][1] == {"kind": "hold"}
    # Arrays are 0-indexed ticks: array position 0 is in-memory tick 1.
    assert doc["subdivision"][0] == 1
    assert doc["subdivision"][3] == 4


def test_bytes_are_canonical() -> None:
    doc = document_from_chorale(fixture())
    scrambled = json.loads(json.dumps(doc))
    assert document_bytes(doc) == document_bytes(scrambled)


def test_bad_format_rejected() -> None:
    doc = document_from_chorale(fixture())
    doc["format"] = "something-else"
    with pytest.raises(DocumentError):
        chorale_from_document(doc)


def test_bad_version_rejected() -> None:
    doc = document_from_chorale(fixture())
    doc["version"] = 2
    with pytest.raises(DocumentError):
        chorale_from_document(doc)


def test_invariant_violations_reported() -> None:
    doc = document_from_chorale(fixture())
    doc["voices"][1][0] = {"kind": "hold"}  # leading hold in the alto
    with pytest.raises(DocumentError) as error:
        chorale_from_document(doc)
    assert any(v.rule == "leading hold" for v in error.value.violations)


def test_length_mismatch_rejected() -> None:
    doc = document_from_chorale(fixture())
    doc["length"] = 15
    with pytest.raises(DocumentError):
        chorale_from_document(doc)


def test_inconsistent_midi_rejected() -> None:
    doc = document_from_chorale(fixture())
    doc["voices"][0][0]["midi"] = 99
    with pytest.raises(DocumentError):
        chorale_from_document(doc)


def test_midi_mode_document() -> None:
    chorale = make_chorale(
        [[t for t in v.tokens] for v in block_chorale([[72], [67], [64], [48]]).voices]
    )
    doc = document_from_chorale(chorale)
    assert doc["encoding"] == "midi"
    assert doc["voices"][0][0]["label"] == "72"
    assert chorale_from_document(doc) == chorale
