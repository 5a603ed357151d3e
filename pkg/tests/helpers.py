from __future__ import annotations

from choralegen.score import (
    Chorale,
    MetadataSeq,
    NoteToken,
    VoiceSeq,
    midi_pitch,
    spelled_pitch,
)

ALTERS = {"bb": -2, "b": -1, "": 0, "#": 1, "##": 2}

# Classic SATB tessituras used by the synthetic fixtures.
FIXTURE_RANGES = {1: (60, 79), 2: (55, 74), 3: (48, 67), 4: (40, 62)}


def make_chorale(
    voice_tokens: list[list[NoteToken]],
    fermata: list[bool] | None = None,
    key_signature: list[int] | int = 0,
) -> Chorale:
    """Build a chorale from raw token rows (soprano first)."""
    length = len(voice_tokens[0])
    metadata = MetadataSeq.default(length)
    if fermata is not None:
        metadata = metadata.with_fermata(fermata)
    if isinstance(key_signature, int):
        metadata = metadata.with_key_signature([key_signature] * length)
    else:
        metadata = metadata.with_key_signature(key_signature)
    voices = tuple(VoiceSeq(i + 1, tuple(tokens)) for i, tokens in enumerate(voice_tokens))
    return Chorale(voices, metadata)


def block_chorale(midi_notes: list[list[int]], ticks_per_note: int = 4, spelled: bool = False) -> Chorale:
    """Chorale where every voice plays the given notes, each lasting ticks_per_note.

    midi_notes is indexed [voice][note]; with spelled=True the notes are name
    strings instead of MIDI numbers.
    """
    rows = []
    for notes in midi_notes:
        tokens: list[NoteToken] = []
        for note in notes:
            tokens.append(spelled_pitch(note) if spelled else midi_pitch(note))
            tokens.extend([NoteToken("hold")] * (ticks_per_note - 1))
        rows.append(tokens)
    return make_chorale(rows)


def tiny_corpus():
    """Six small pieces, five train and one validation, for fast model tests."""
    from choralegen.ingest.corpus import ChoraleRecord, Corpus
    from choralegen.pitch import Interval

    progressions = [
        [[72, 76, 79, 72], [67, 72, 74, 67], [64, 67, 71, 64], [48, 52, 43, 48]],
        [[74, 72, 76, 74], [69, 67, 72, 69], [66, 64, 67, 66], [50, 48, 52, 50]],
        [[76, 74, 72, 76], [72, 69, 67, 72], [67, 66, 64, 67], [52, 50, 48, 52]],
        [[72, 77, 76, 72], [69, 72, 72, 67], [65, 69, 67, 64], [53, 45, 48, 48]],
        [[79, 77, 76, 74], [74, 72, 72, 69], [71, 69, 67, 66], [55, 53, 52, 50]],
        [[72, 74, 76, 77], [67, 69, 72, 74], [64, 66, 67, 69], [48, 50, 52, 53]],
    ]
    records = []
    for n, notes in enumerate(progressions):
        split = "validation" if n == 5 else "train"
        records.append(
            ChoraleRecord(block_chorale(notes, ticks_per_note=4), f"piece{n:02d}", Interval(0, 0), split)
        )
    return Corpus(tuple(records))


def note_xml(
    name: str,
    duration: int,
    fermata: bool = False,
    chord: bool = False,
    rest: bool = False,
    tie: str | None = None,
    voice_number: int | None = None,
) -> str:
    """One MusicXML <note> element; name like "F#4", duration in divisions."""
    parts = ["<note>"]
    if chord:
        parts.append("<chord/>")
    if rest:
        parts.append("<rest/>")
    else:
        letter = name[0]
        accidental = name[1:-1]
        octave = name[-1]
        parts.append(f"<pitch><step>{letter}</step>")
        if ALTERS[accidental]:
            parts.append(f"<alter>{ALTERS[accidental]}</alter>")
        parts.append(f"<octave>{octave}</octave></pitch>")
    parts.append(f"<duration>{duration}</duration>")
    if tie in ("start", "stop", "both"):
        if tie in ("stop", "both"):
            parts.append('<tie type="stop"/>')
        if tie in ("start", "both"):
            parts.append('<tie type="start"/>')
    if voice_number is not None:
        parts.append(f"<voice>{voice_number}</voice>")
    if fermata:
        parts.append("<notations><fermata/></notations>")
    parts.append("</note>")
    return "".join(parts)


def musicxml_doc(part_measures: list[list[str]], divisions: int = 4, fifths: int = 0) -> bytes:
    """Hand-rolled partwise document: part_measures[p][m] is a measure's inner XML."""
    chunks = ['<?xml version="1.0" encoding="UTF-8"?>', '<score-partwise version="3.1">', "<part-list>"]
    for p in range(len(part_measures)):
        chunks.append(f'<score-part id="P{p + 1}"><part-name>Voice {p + 1}</part-name></score-part>')
    chunks.append("</part-list>")
    for p, measures in enumerate(part_measures):
        chunks.append(f'<part id="P{p + 1}">')
        for m, inner in enumerate(measures):
            chunks.append(f'<measure number="{m + 1}">')
            if m == 0:
                chunks.append(
                    f"<attributes><divisions>{divisions}</divisions>"
                    f"<key><fifths>{fifths}</fifths></key>"
                    "<time><beats>4</beats><beat-type>4</beat-type></time></attributes>"
                )
            chunks.append(inner)
            chunks.append("</measure>")
        chunks.append("</part>")
    chunks.append("</score-partwise>")
    return "".join(chunks).encode()


def satb_quarters(notes: list[list[str]], divisions: int = 4, fifths: int = 0) -> bytes:
    """Four-part document of quarter notes; notes[p] is a list of names, 4 per measure."""
    part_measures = []
    for voice_notes in notes:
        measures = []
        for m in range(0, len(voice_notes), 4):
            measures.append("".join(note_xml(n, divisions) for n in voice_notes[m : m + 4]))
        part_measures.append(measures)
    return musicxml_doc(part_measures, divisions=divisions, fifths=fifths)
