"""Standard MIDI File writer: format 1, 480 ticks per quarter, one track per voice."""

from __future__ import annotations

import struct

from ..score import Chorale, VoiceSeq

TICKS_PER_QUARTER = 480
TICKS_PER_SIXTEENTH = TICKS_PER_QUARTER // 4
DEFAULT_TEMPO_US = 500_000  # 120 bpm
TRACK_NAMES = ("Soprano", "Alto", "Tenor", "Bass")
VELOCITY = 80


def export_midi(chorale: Chorale) -> bytes:
    """Render note durations as run lengths of pitch-plus-holds times one sixteenth."""
    tracks = []
    for voice in chorale.voices:
        tracks.append(_voice_track(voice, first=voice.voice_index == 1))
    header = b"MThd" + struct.pack(">IHHH", 6, 1, len(tracks), TICKS_PER_QUARTER)
    return header + b"".join(tracks)


def _voice_track(voice: VoiceSeq, first: bool) -> bytes:
    events = bytearray()
    channel = voice.voice_index - 1

    def meta(delta: int, kind: int, payload: bytes) -> None:
        events.extend(_vlq(delta))
        events.extend(bytes((0xFF, kind)))
        events.extend(_vlq(len(payload)))
        events.extend(payload)

    name = TRACK_NAMES[voice.voice_index - 1].encode()
    meta(0, 0x03, name)
    if first:
        meta(0, 0x51, struct.pack(">I", DEFAULT_TEMPO_US)[1:])
        meta(0, 0x58, bytes((4, 2, 24, 8)))

    cursor = 0
    for start, ticks, midi in _runs(voice):
        on_at = start * TICKS_PER_SIXTEENTH
        off_at = (start + ticks) * TICKS_PER_SIXTEENTH
        events.extend(_vlq(on_at - cursor))
        events.extend(bytes((0x90 | channel, midi, VELOCITY)))
        events.extend(_vlq(off_at - on_at))
        events.extend(bytes((0x80 | channel, midi, 0)))
        cursor = off_at
    meta(0, 0x2F, b"")

    return b"MTrk" + struct.pack(">I", len(events)) + bytes(events)


def _runs(voice: VoiceSeq) -> list[tuple[int, int, int]]:
    runs: list[tuple[int, int, int]] = []
    for t0, token in enumerate(voice.tokens):
        if token.is_pitch:
            runs.append((t0, 1, token.midi))
        elif token.is_hold:
            if not runs:
                raise ValueError("leading hold cannot be exported")
            start, ticks, midi = runs[-1]
            runs[-1] = (start, ticks + 1, midi)
        else:
            raise ValueError("pad tokens cannot be exported")
    return runs


def _vlq(value: int) -> bytes:
    """MIDI variable-length quantity."""
    if value < 0:
        raise ValueError("negative delta time")
    chunks = [value & 0x7F]
    value >>= 7
    while value:
        chunks.append(0x80 | (value & 0x7F))
        value >>= 7
    return bytes(reversed(chunks))
