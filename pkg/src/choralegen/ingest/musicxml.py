"""MusicXML 3.x partwise subset: four single-voice sung parts on a sixteenth grid.

Parsing is strict by design: anything the token representation cannot hold
exactly (off-grid durations, chords, rests, grace notes, more or fewer than
four parts) is rejected rather than approximated, because silent rounding
would corrupt the style the models learn.
"""

from __future__ import annotations

import xml.etree.ElementTree as etree
from dataclasses import dataclass

from ..pitch import SpelledPitch, spell_midi
from ..score import (
    HOLD,
    Chorale,
    MetadataSeq,
    NoteToken,
    VoiceSeq,
    spelled_pitch,
    subdivision_for,
)

TICKS_PER_QUARTER = 4  # sixteenth grid
TICKS_PER_MEASURE = 16  # exported measures are written in 4/4

_ALTER_TO_ACCIDENTAL = {-2: "bb", -1: "b", 0: "", 1: "#", 2: "##"}
_VOICE_PART_NAMES = ("Soprano", "Alto", "Tenor", "Bass")
_TYPE_FOR_TICKS = {1: "16th", 2: "eighth", 4: "quarter", 8: "half", 16: "whole"}
_DOTTED_TYPE_FOR_TICKS = {3: "eighth", 6: "quarter", 12: "half", 24: "whole"}


class ScoreInputError(ValueError):
    """A document cannot be represented as a chorale; subtype says why."""


class MalformedInput(ScoreInputError):
    pass


class UnsupportedSubdivision(ScoreInputError):
    """A note onset or offset does not align to the sixteenth grid."""


class NotFourVoices(ScoreInputError):
    pass


class VoiceDivision(ScoreInputError):
    """A part carries two simultaneous notes (chords or multi-voice writing)."""


class UnsupportedFeature(ScoreInputError):
    """Grace notes, rests, ornaments, repeats and similar are out of scope."""


@dataclass
class _Note:
    pitch: SpelledPitch
    ticks: int
    fermata: bool
    tie_start: bool
    tie_stop: bool


@dataclass
class _Part:
    notes: list[_Note]
    key_changes: list[tuple[int, int]]  # (tick offset, fifths)

    @property
    def total_ticks(self) -> int:
        return sum(n.ticks for n in self.notes)


def parse_musicxml(document: bytes) -> Chorale:
    """Read a four-part score into a spelled-mode chorale.

    Raises NotFourVoices, VoiceDivision, UnsupportedSubdivision,
    UnsupportedFeature or MalformedInput on anything outside the subset.
    """
    parts = _parse_parts(document)
    if len(parts) != 4:
        raise NotFourVoices(f"expected 4 sung parts, found {len(parts)}")
    lengths = {p.total_ticks for p in parts}
    if len(lengths) != 1:
        raise MalformedInput(f"parts have unequal lengths: {sorted(lengths)}")
    length = lengths.pop()
    if length == 0:
        raise MalformedInput("score contains no notes")

    voices = tuple(
        VoiceSeq(i + 1, _tokens_for_part(part)) for i, part in enumerate(parts)
    )
    fermata = [False] * length
    for part in parts:
        tick = 0
        for note in part.notes:
            if note.fermata:
                for t in range(tick, tick + note.ticks):
                    fermata[t] = True
            tick += note.ticks
    metadata = MetadataSeq(
        fermata=tuple(fermata),
        subdivision=tuple(subdivision_for(t) for t in range(1, length + 1)),
        key_signature=tuple(_key_per_tick(parts[0].key_changes, length)),
    )
    return Chorale(voices, metadata)


def parse_melody(document: bytes) -> Chorale:
    """Read only the first part of a score as a melody-bearing chorale.

    The soprano carries the melody; the other three voices are filled with
    copies of its onsets an octave pattern below only as placeholders, so the
    result validates and can seed resampling with voices 2-4 free.
    """
    parts = _parse_parts(document)
    if not parts:
        raise MalformedInput("no parts found")
    melody = parts[0]
    length = melody.total_ticks
    if length == 0:
        raise MalformedInput("melody part contains no notes")
    soprano = VoiceSeq(1, _tokens_for_part(melody))

    placeholder_offsets = (0, -5, -12, -17)
    voices = [soprano]
    for voice_index in (2, 3, 4):
        tokens = []
        for token in soprano.tokens:
            if token.is_pitch:
                shifted = spell_midi(token.midi + placeholder_offsets[voice_index - 1])
                tokens.append(spelled_pitch(shifted))
            else:
                tokens.append(token)
        voices.append(VoiceSeq(voice_index, tuple(tokens)))

    fermata = [False] * length
    tick = 0
    for note in melody.notes:
        if note.fermata:
            for t in range(tick, tick + note.ticks):
                fermata[t] = True
        tick += note.ticks
    metadata = MetadataSeq(
        fermata=tuple(fermata),
        subdivision=tuple(subdivision_for(t) for t in range(1, length + 1)),
        key_signature=tuple(_key_per_tick(melody.key_changes, length)),
    )
    return Chorale(tuple(voices), metadata)


def _parse_parts(document: bytes) -> list[_Part]:
    try:
        root = etree.fromstring(document)
    except etree.ParseError as exc:
        raise MalformedInput(f"not well-formed XML: {exc}") from exc
    if root.tag != "score-partwise":
        raise MalformedInput(f"expected score-partwise, found {root.tag}")

    parts = []
    for part in root.findall("part"):
        parts.append(_parse_part(part))
    return parts


def _parse_part(part: etree.Element) -> _Part:
    notes: list[_Note] = []
    key_changes: list[tuple[int, int]] = []
    divisions: int | None = None
    tick = 0

    for measure in part.findall("measure"):
        for element in measure:
            if element.tag == "attributes":
                div = element.find("divisions")
                if div is not None:
                    divisions = _int_text(div, "divisions")
                fifths = element.find("key/fifths")
                if fifths is not None:
                    key_changes.append((tick, _int_text(fifths, "fifths")))
            elif element.tag == "note":
                note = _parse_note(element, divisions)
                notes.append(note)
                tick += note.ticks
            elif element.tag in ("backup", "forward"):
                raise VoiceDivision("part uses backup/forward (multiple voices per staff)")
            elif element.tag == "barline":
                if element.find("repeat") is not None:
                    raise UnsupportedFeature("repeat barlines are not supported")

    seen_voices = {v.text for v in part.findall("measure/note/voice") if v.text}
    if len(seen_voices) > 1:
        raise VoiceDivision(f"part mixes voice numbers {sorted(seen_voices)}")
    return _Part(notes=notes, key_changes=key_changes)


def _parse_note(element: etree.Element, divisions: int | None) -> _Note:
    if element.find("grace") is not None:
        raise UnsupportedFeature("grace notes are not supported")
    if element.find("cue") is not None:
        raise UnsupportedFeature("cue notes are not supported")
    if element.find("chord") is not None:
        raise VoiceDivision("two simultaneous notes in one part")
    if element.find("rest") is not None:
        raise UnsupportedFeature("rests are not representable in the hold encoding")
    if element.find("notations/ornaments") is not None:
        raise UnsupportedFeature("ornaments are not supported")
    if divisions is None:
        raise MalformedInput("note appears before any divisions declaration")

    pitch = element.find("pitch")
    if pitch is None:
        raise MalformedInput("note without pitch")
    step = pitch.findtext("step")
    if step is None or step not in "ABCDEFG" or len(step) != 1:
        raise MalformedInput(f"bad step {step!r}")
    octave = _int_text(pitch.find("octave"), "octave")
    alter_text = pitch.findtext("alter")
    alter = int(alter_text) if alter_text is not None else 0
    if alter not in _ALTER_TO_ACCIDENTAL:
        raise UnsupportedFeature(f"alteration {alter} beyond double sharp/flat")

    duration = _int_text(element.find("duration"), "duration")
    ticks4, remainder = divmod(duration * TICKS_PER_QUARTER, divisions)
    if remainder != 0 or ticks4 <= 0:
        raise UnsupportedSubdivision(
            f"duration {duration}/{divisions} quarters does not sit on the sixteenth grid"
        )

    tie_start = any(t.get("type") == "start" for t in element.findall("tie"))
    tie_stop = any(t.get("type") == "stop" for t in element.findall("tie"))
    fermata = element.find("notations/fermata") is not None

    try:
        spelled = SpelledPitch(step, _ALTER_TO_ACCIDENTAL[alter], octave)
    except ValueError as exc:
        raise MalformedInput(str(exc)) from exc
    return _Note(spelled, ticks4, fermata, tie_start, tie_stop)


def _tokens_for_part(part: _Part) -> tuple[NoteToken, ...]:
    tokens: list[NoteToken] = []
    previous: _Note | None = None
    for note in part.notes:
        continues = note.tie_stop and previous is not None and previous.pitch.midi == note.pitch.midi
        if continues:
            tokens.extend([HOLD] * note.ticks)
        else:
            tokens.append(spelled_pitch(note.pitch))
            tokens.extend([HOLD] * (note.ticks - 1))
        previous = note
    return tuple(tokens)


def _key_per_tick(key_changes: list[tuple[int, int]], length: int) -> list[int]:
    keys = [0] * length
    current = key_changes[0][1] if key_changes and key_changes[0][0] == 0 else 0
    change_index = 0
    changes = sorted(key_changes)
    for tick in range(length):
        while change_index < len(changes) and changes[change_index][0] <= tick:
            current = changes[change_index][1]
            change_index += 1
        keys[tick] = max(-7, min(7, current))
    return keys


def _int_text(element: etree.Element | None, what: str) -> int:
    if element is None or element.text is None:
        raise MalformedInput(f"missing {what}")
    try:
        return int(element.text.strip())
    except ValueError as exc:
        raise MalformedInput(f"bad {what}: {element.text!r}") from exc


def export_musicxml(chorale: Chorale) -> bytes:
    """Write a chorale as partwise MusicXML in 4/4 measures of 16 ticks.

    Runs of pitch-plus-holds become notes; runs crossing a barline are split
    and tied.  parse_musicxml(export_musicxml(c)) == c for validated spelled
    chorales whose fermata spans align with note spans.
    """
    root = etree.Element("score-partwise", version="3.1")
    part_list = etree.SubElement(root, "part-list")
    for i, name in enumerate(_VOICE_PART_NAMES, start=1):
        score_part = etree.SubElement(part_list, "score-part", id=f"P{i}")
        etree.SubElement(score_part, "part-name").text = name

    fermata = chorale.metadata.fermata
    keys = chorale.metadata.key_signature
    length = chorale.length

    for voice in chorale.voices:
        part = etree.SubElement(root, "part", id=f"P{voice.voice_index}")
        measures = _measure_spans(length)
        runs = _note_runs(voice)
        segments = _split_runs_at_barlines(runs, measures)

        written_key: int | None = None
        segment_index = 0
        for number, (start, end) in enumerate(measures, start=1):
            measure = etree.SubElement(part, "measure", number=str(number))
            bar_key = keys[start] if start < length else 0
            attributes_needed = number == 1 or bar_key != written_key
            if attributes_needed:
                attributes = etree.SubElement(measure, "attributes")
                if number == 1:
                    etree.SubElement(attributes, "divisions").text = str(TICKS_PER_QUARTER)
                key = etree.SubElement(attributes, "key")
                etree.SubElement(key, "fifths").text = str(bar_key)
                if number == 1:
                    time = etree.SubElement(attributes, "time")
                    etree.SubElement(time, "beats").text = "4"
                    etree.SubElement(time, "beat-type").text = "4"
                    _write_clef(attributes, voice.voice_index)
                written_key = bar_key
            while segment_index < len(segments) and segments[segment_index][0] < end:
                seg_start, seg_ticks, token, tie_start, tie_stop = segments[segment_index]
                covered = all(fermata[t] for t in range(seg_start, seg_start + seg_ticks))
                _write_note(measure, token, seg_ticks, tie_start, tie_stop, covered)
                segment_index += 1

    body = etree.tostring(root, encoding="unicode")
    header = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<!DOCTYPE score-partwise PUBLIC "-//Recordare//DTD MusicXML 3.1 Partwise//EN" '
        '"http://www.musicxml.org/dtds/partwise.dtd">\n'
    )
    return (header + body).encode("utf-8")


def _measure_spans(length: int) -> list[tuple[int, int]]:
    spans = []
    start = 0
    while start < length:
        spans.append((start, min(start + TICKS_PER_MEASURE, length)))
        start += TICKS_PER_MEASURE
    return spans


def _note_runs(voice: VoiceSeq) -> list[tuple[int, int, NoteToken]]:
    """(start tick0, length, onset token) for each pitch-plus-holds run."""
    runs: list[tuple[int, int, NoteToken]] = []
    for t0, token in enumerate(voice.tokens):
        if token.is_pitch:
            runs.append((t0, 1, token))
        elif token.is_hold:
            if not runs:
                raise ValueError("leading hold cannot be exported")
            start, ticks, onset = runs[-1]
            runs[-1] = (start, ticks + 1, onset)
        else:
            raise ValueError("pad tokens cannot be exported")
    return runs


def _split_runs_at_barlines(
    runs: list[tuple[int, int, NoteToken]], measures: list[tuple[int, int]]
) -> list[tuple[int, int, NoteToken, bool, bool]]:
    boundaries = [end for _, end in measures]
    segments: list[tuple[int, int, NoteToken, bool, bool]] = []
    for start, ticks, token in runs:
        cuts = [start]
        for b in boundaries:
            if start < b < start + ticks:
                cuts.append(b)
        cuts.append(start + ticks)
        for i in range(len(cuts) - 1):
            seg_start, seg_end = cuts[i], cuts[i + 1]
            tie_stop = i > 0
            tie_start = i < len(cuts) - 2
            segments.append((seg_start, seg_end - seg_start, token, tie_start, tie_stop))
    return segments


def _write_note(
    measure: etree.Element,
    token: NoteToken,
    ticks: int,
    tie_start: bool,
    tie_stop: bool,
    fermata: bool,
) -> None:
    note = etree.SubElement(measure, "note")
    pitch = etree.SubElement(note, "pitch")
    spelled = token.spelling if token.spelling is not None else spell_midi(token.midi)
    etree.SubElement(pitch, "step").text = spelled.letter
    alter = {"bb": -2, "b": -1, "": 0, "#": 1, "##": 2}[spelled.accidental]
    if alter != 0:
        etree.SubElement(pitch, "alter").text = str(alter)
    etree.SubElement(pitch, "octave").text = str(spelled.octave)
    etree.SubElement(note, "duration").text = str(ticks)
    if tie_stop:
        etree.SubElement(note, "tie", type="stop")
    if tie_start:
        etree.SubElement(note, "tie", type="start")
    type_name = _TYPE_FOR_TICKS.get(ticks)
    dotted = _DOTTED_TYPE_FOR_TICKS.get(ticks)
    if type_name is not None:
        etree.SubElement(note, "type").text = type_name
    elif dotted is not None:
        etree.SubElement(note, "type").text = dotted
        etree.SubElement(note, "dot")
    if tie_stop or tie_start or fermata:
        notations = etree.SubElement(note, "notations")
        if tie_stop:
            etree.SubElement(notations, "tied", type="stop")
        if tie_start:
            etree.SubElement(notations, "tied", type="start")
        if fermata:
            etree.SubElement(notations, "fermata")


def _write_clef(attributes: etree.Element, voice_index: int) -> None:
    clef = etree.SubElement(attributes, "clef")
    if voice_index in (1, 2):
        etree.SubElement(clef, "sign").text = "G"
        etree.SubElement(clef, "line").text = "2"
    elif voice_index == 3:
        etree.SubElement(clef, "sign").text = "G"
        etree.SubElement(clef, "line").text = "2"
        etree.SubElement(clef, "clef-octave-change").text = "-1"
    else:
        etree.SubElement(clef, "sign").text = "F"
        etree.SubElement(clef, "line").text = "4"
