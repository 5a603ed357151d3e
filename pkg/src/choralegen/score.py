"""Time-discretized four-voice score representation.

A chorale is four token sequences on a sixteenth-note grid plus aligned
metadata (fermata flags, beat subdivision indexes, per-bar key signatures).
Rhythm is encoded inside the token stream: a hold token means the previous
note keeps sounding for another sixteenth.  Ticks are 1-based throughout the
in-memory model; wire formats convert at the boundary.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .pitch import Interval, SpelledPitch, UnspellableNote, transpose_spelled

VOICE_NAMES = ("soprano", "alto", "tenor", "bass")
N_VOICES = 4
TICKS_PER_BAR = 16
KEY_SIGNATURE_MIN = -7
KEY_SIGNATURE_MAX = 7

HOLD_LABEL = "__"
PAD_START_LABEL = "START"
PAD_END_LABEL = "END"


@dataclass(frozen=True)
class NoteToken:
    """One grid cell: a pitch onset, a hold, or a context-window pad.

    Pitch tokens always carry a MIDI number; in spelled mode they also carry
    the note name, so enharmonic notes are distinct tokens.
    """

    kind: str  # "pitch" | "hold" | "pad_start" | "pad_end"
    midi: int | None = None
    spelling: SpelledPitch | None = None

    def __post_init__(self) -> None:
        if self.kind == "pitch":
            if self.midi is None or not 0 <= self.midi <= 127:
                raise ValueError(f"pitch token needs a MIDI number in [0, 127], got {self.midi}")
            if self.spelling is not None and self.spelling.midi != self.midi:
                raise ValueError(f"spelling {self.spelling} does not match MIDI {self.midi}")
        elif self.kind in ("hold", "pad_start", "pad_end"):
            if self.midi is not None or self.spelling is not None:
                raise ValueError(f"{self.kind} token carries no pitch payload")
        else:
            raise ValueError(f"unknown token kind {self.kind!r}")

    @property
    def is_pitch(self) -> bool:
        return self.kind == "pitch"

    @property
    def is_hold(self) -> bool:
        return self.kind == "hold"

    @property
    def is_pad(self) -> bool:
        return self.kind in ("pad_start", "pad_end")

    @property
    def label(self) -> str:
        if self.kind == "hold":
            return HOLD_LABEL
        if self.kind == "pad_start":
            return PAD_START_LABEL
        if self.kind == "pad_end":
            return PAD_END_LABEL
        if self.spelling is not None:
            return str(self.spelling)
        return str(self.midi)


HOLD = NoteToken("hold")
PAD_START = NoteToken("pad_start")
PAD_END = NoteToken("pad_end")


def midi_pitch(number: int) -> NoteToken:
    return NoteToken("pitch", midi=number)


def spelled_pitch(name: str | SpelledPitch) -> NoteToken:
    sp = SpelledPitch.parse(name) if isinstance(name, str) else name
    return NoteToken("pitch", midi=sp.midi, spelling=sp)


def parse_token_label(label: str, mode: str) -> NoteToken:
    """Inverse of NoteToken.label for a given encoding mode ("midi" or "spelled")."""
    if label == HOLD_LABEL:
        return HOLD
    if label == PAD_START_LABEL:
        return PAD_START
    if label == PAD_END_LABEL:
        return PAD_END
    if mode == "midi":
        return midi_pitch(int(label))
    if mode == "spelled":
        return spelled_pitch(label)
    raise ValueError(f"unknown encoding mode {mode!r}")


def subdivision_for(t: int) -> int:
    """Beat subdivision index (1..4) of a 1-based tick."""
    return (t - 1) % 4 + 1


@dataclass(frozen=True)
class VoiceSeq:
    """One voice's token sequence; voice_index is 1-based (1 = soprano)."""

    voice_index: int
    tokens: tuple[NoteToken, ...]

    def __post_init__(self) -> None:
        if not 1 <= self.voice_index <= N_VOICES:
            raise ValueError(f"voice_index must be in [1, {N_VOICES}], got {self.voice_index}")
        object.__setattr__(self, "tokens", tuple(self.tokens))

    def __len__(self) -> int:
        return len(self.tokens)

    def token_at(self, tick: int) -> NoteToken:
        """Token at a 1-based tick."""
        return self.tokens[tick - 1]


@dataclass(frozen=True)
class MetadataSeq:
    """Aligned metadata streams: fermata flags, subdivision indexes, key signatures."""

    fermata: tuple[bool, ...]
    subdivision: tuple[int, ...]
    key_signature: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "fermata", tuple(bool(f) for f in self.fermata))
        object.__setattr__(self, "subdivision", tuple(int(s) for s in self.subdivision))
        object.__setattr__(self, "key_signature", tuple(int(k) for k in self.key_signature))

    @classmethod
    def default(cls, length: int, key_signature: int = 0) -> MetadataSeq:
        return cls(
            fermata=tuple(False for _ in range(length)),
            subdivision=tuple(subdivision_for(t) for t in range(1, length + 1)),
            key_signature=tuple(key_signature for _ in range(length)),
        )

    def __len__(self) -> int:
        return len(self.subdivision)

    def with_fermata(self, fermata: Iterable[bool]) -> MetadataSeq:
        return MetadataSeq(tuple(fermata), self.subdivision, self.key_signature)

    def with_key_signature(self, key_signature: Iterable[int]) -> MetadataSeq:
        return MetadataSeq(self.fermata, self.subdivision, tuple(key_signature))


@dataclass(frozen=True)
class Chorale:
    """Four voices plus metadata on a shared sixteenth grid."""

    voices: tuple[VoiceSeq, ...]
    metadata: MetadataSeq

    def __post_init__(self) -> None:
        voices = tuple(self.voices)
        if len(voices) != N_VOICES:
            raise ValueError(f"a chorale has exactly {N_VOICES} voices, got {len(voices)}")
        for position, voice in enumerate(voices, start=1):
            if voice.voice_index != position:
                raise ValueError(f"voice at position {position} has voice_index {voice.voice_index}")
        object.__setattr__(self, "voices", voices)

    @property
    def length(self) -> int:
        return len(self.voices[0])

    @property
    def encoding_mode(self) -> str:
        """"spelled" when pitch tokens carry note names, else "midi"."""
        for voice in self.voices:
            for token in voice.tokens:
                if token.is_pitch:
                    return "spelled" if token.spelling is not None else "midi"
        return "midi"

    def voice(self, voice_index: int) -> VoiceSeq:
        return self.voices[voice_index - 1]

    def token_at(self, voice_index: int, tick: int) -> NoteToken:
        return self.voices[voice_index - 1].token_at(tick)

    def with_token(self, voice_index: int, tick: int, token: NoteToken) -> Chorale:
        tokens = list(self.voices[voice_index - 1].tokens)
        tokens[tick - 1] = token
        voices = list(self.voices)
        voices[voice_index - 1] = VoiceSeq(voice_index, tuple(tokens))
        return Chorale(tuple(voices), self.metadata)

    def with_metadata(self, metadata: MetadataSeq) -> Chorale:
        return Chorale(self.voices, metadata)


class Violation(NamedTuple):
    """One broken invariant; voice/tick are None when the rule is not cell-specific."""

    voice: int | None
    tick: int | None
    rule: str


def validate(chorale: Chorale, vocabularies: tuple[Vocabulary, ...] | None = None) -> list[Violation]:
    """Check every representation invariant; returns an empty list iff all hold.

    Violations are data, not failures: callers decide how strict to be.  When
    vocabularies are given, token membership and voice ranges are checked too.
    """
    violations: list[Violation] = []
    length = chorale.length

    for voice in chorale.voices:
        if len(voice) != length:
            violations.append(Violation(voice.voice_index, None, "length mismatch"))
    for name, seq in (
        ("fermata", chorale.metadata.fermata),
        ("subdivision", chorale.metadata.subdivision),
        ("key_signature", chorale.metadata.key_signature),
    ):
        if len(seq) != length:
            violations.append(Violation(None, None, f"{name} length mismatch"))

    modes = set()
    for voice in chorale.voices:
        for tick, token in enumerate(voice.tokens, start=1):
            if tick == 1 and token.is_hold:
                violations.append(Violation(voice.voice_index, 1, "leading hold"))
            if token.is_pad:
                violations.append(Violation(voice.voice_index, tick, "pad token inside sequence"))
            if token.is_pitch:
                modes.add("spelled" if token.spelling is not None else "midi")
    if len(modes) > 1:
        violations.append(Violation(None, None, "mixed encoding"))

    for tick, sub in enumerate(chorale.metadata.subdivision, start=1):
        if sub != subdivision_for(tick):
            violations.append(Violation(None, tick, "subdivision formula"))
    for tick, key in enumerate(chorale.metadata.key_signature, start=1):
        if not KEY_SIGNATURE_MIN <= key <= KEY_SIGNATURE_MAX:
            violations.append(Violation(None, tick, "key signature range"))

    # A fermata span must begin on a note onset: flag voices holding through
    # the start of a span (the onset they continue is not covered by it).
    fermata = chorale.metadata.fermata
    for tick in range(1, min(length, len(fermata)) + 1):
        starts = fermata[tick - 1] and (tick == 1 or not fermata[tick - 2])
        if not starts:
            continue
        for voice in chorale.voices:
            if tick <= len(voice) and voice.token_at(tick).is_hold:
                violations.append(Violation(voice.voice_index, tick, "fermata starts mid-note"))

    if vocabularies is not None:
        for voice, vocab in zip(chorale.voices, vocabularies):
            for tick, token in enumerate(voice.tokens, start=1):
                if not vocab.contains(token):
                    violations.append(Violation(voice.voice_index, tick, "token outside vocabulary"))
                elif token.is_pitch:
                    low, high = vocab.midi_range
                    if not low <= token.midi <= high:
                        violations.append(Violation(voice.voice_index, tick, "pitch outside voice range"))

    return violations


def transpose(chorale: Chorale, interval: Interval) -> Chorale:
    """Shift every pitch by a diatonic interval; metadata moves with it.

    Hold/subdivision/fermata are untouched; key signatures shift by the
    interval's sharp count, clamped to the representable [-7, 7] band.
    Raises UnspellableNote when any note cannot be written after the shift.
    """
    voices = []
    for voice in chorale.voices:
        tokens = []
        for token in voice.tokens:
            if not token.is_pitch:
                tokens.append(token)
            elif token.spelling is not None:
                tokens.append(spelled_pitch(transpose_spelled(token.spelling, interval)))
            else:
                target = token.midi + interval.semitones
                if not 0 <= target <= 127:
                    raise UnspellableNote(f"MIDI {token.midi} moved by {interval} leaves the MIDI range")
                tokens.append(midi_pitch(target))
        voices.append(VoiceSeq(voice.voice_index, tuple(tokens)))

    delta = interval.sharps_delta
    keys = tuple(
        max(KEY_SIGNATURE_MIN, min(KEY_SIGNATURE_MAX, k + delta))
        for k in chorale.metadata.key_signature
    )
    return Chorale(tuple(voices), chorale.metadata.with_key_signature(keys))


def strip_spelling(chorale: Chorale) -> Chorale:
    """Forget note names, keeping MIDI numbers: spelled mode -> MIDI mode.

    Lossy by design (enharmonic spellings collapse); there is no inverse.
    """
    voices = tuple(
        VoiceSeq(
            voice.voice_index,
            tuple(
                midi_pitch(token.midi) if token.is_pitch else token for token in voice.tokens
            ),
        )
        for voice in chorale.voices
    )
    return Chorale(voices, chorale.metadata)


def to_piano_roll(voice: VoiceSeq) -> list[int]:
    """Per-tick MIDI numbers with held notes repeated.

    Lossy: re-articulations of the same pitch disappear.  Pads and a leading
    hold violate the precondition and raise ValueError.
    """
    numbers: list[int] = []
    current: int | None = None
    for tick, token in enumerate(voice.tokens, start=1):
        if token.is_pad:
            raise ValueError(f"pad token at tick {tick}; piano roll is defined on played sequences")
        if token.is_pitch:
            current = token.midi
        elif current is None:
            raise ValueError("leading hold: no pitch to continue")
        numbers.append(current)
    return numbers


def from_piano_roll(numbers: Iterable[int], voice_index: int = 1) -> VoiceSeq:
    """Repeated values become pitch-plus-holds (MIDI mode)."""
    tokens: list[NoteToken] = []
    previous: int | None = None
    for number in numbers:
        if number == previous:
            tokens.append(HOLD)
        else:
            tokens.append(midi_pitch(number))
            previous = number
    return VoiceSeq(voice_index, tuple(tokens))


class Vocabulary:
    """Ordered token set for one voice: hold and pads at fixed indices, then pitches.

    Index 0 is always the hold token, 1/2 the pads; pitch tokens follow in
    ascending MIDI (spelled duplicates ordered flat-to-sharp).
    """

    HOLD_INDEX = 0
    PAD_START_INDEX = 1
    PAD_END_INDEX = 2
    RESERVED = 3

    def __init__(self, voice_index: int, pitch_tokens: Iterable[NoteToken], mode: str) -> None:
        if mode not in ("midi", "spelled"):
            raise ValueError(f"unknown encoding mode {mode!r}")
        self.voice_index = voice_index
        self.mode = mode
        pitches = sorted(set(pitch_tokens), key=_pitch_sort_key)
        for token in pitches:
            if not token.is_pitch:
                raise ValueError("vocabulary pitch list may only contain pitch tokens")
            if (token.spelling is not None) != (mode == "spelled"):
                raise ValueError(f"pitch token {token.label} does not match mode {mode!r}")
        self.tokens: tuple[NoteToken, ...] = (HOLD, PAD_START, PAD_END) + tuple(pitches)
        self._index = {token: i for i, token in enumerate(self.tokens)}

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def pitch_count(self) -> int:
        return len(self.tokens) - self.RESERVED

    @property
    def midi_range(self) -> tuple[int, int]:
        numbers = [t.midi for t in self.tokens if t.is_pitch]
        if not numbers:
            raise ValueError("vocabulary holds no pitch tokens")
        return min(numbers), max(numbers)

    def contains(self, token: NoteToken) -> bool:
        return token in self._index

    def index_of(self, token: NoteToken) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise KeyError(f"token {token.label!r} not in voice-{self.voice_index} vocabulary") from None

    def token_at(self, index: int) -> NoteToken:
        return self.tokens[index]

    def labels(self) -> list[str]:
        return [t.label for t in self.tokens]

    @property
    def samplable_indices(self) -> np.ndarray:
        """Indices a sampler may write: everything except the pad tokens."""
        return np.array(
            [i for i, t in enumerate(self.tokens) if not t.is_pad], dtype=np.int64
        )

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Vocabulary)
            and self.voice_index == other.voice_index
            and self.mode == other.mode
            and self.tokens == other.tokens
        )

    def __hash__(self) -> int:
        return hash((self.voice_index, self.mode, self.tokens))


def _pitch_sort_key(token: NoteToken) -> tuple:
    if token.spelling is None:
        return (token.midi, 0, "", 0)
    sp = token.spelling
    return (token.midi, 1, sp.letter, sp.octave)


def build_vocabularies(chorales: Iterable[Chorale]) -> tuple[Vocabulary, ...]:
    """Per-voice vocabularies over a corpus; all chorales must share one mode."""
    chorales = list(chorales)
    if not chorales:
        raise ValueError("cannot build vocabularies from an empty corpus")
    modes = {c.encoding_mode for c in chorales}
    if len(modes) > 1:
        raise ValueError(f"corpus mixes encoding modes: {sorted(modes)}")
    mode = modes.pop()
    per_voice: list[set[NoteToken]] = [set() for _ in range(N_VOICES)]
    for chorale in chorales:
        for voice in chorale.voices:
            for token in voice.tokens:
                if token.is_pitch:
                    per_voice[voice.voice_index - 1].add(token)
    return tuple(
        Vocabulary(i + 1, tokens, mode) for i, tokens in enumerate(per_voice)
    )


def vocabulary_fingerprint(vocabularies: Iterable[Vocabulary]) -> str:
    """Stable hash of the vocabularies; model files refuse to load on mismatch."""
    h = hashlib.sha256()
    for vocab in vocabularies:
        h.update(vocab.mode.encode())
        h.update(b"\x00")
        for label in vocab.labels():
            h.update(label.encode())
            h.update(b"\x01")
        h.update(b"\x02")
    return h.hexdigest()


def chorale_to_grid(chorale: Chorale, vocabularies: tuple[Vocabulary, ...]) -> np.ndarray:
    """Token-index grid of shape (4, T); row v is voice v+1 in its own vocabulary."""
    grid = np.empty((N_VOICES, chorale.length), dtype=np.int64)
    for voice, vocab in zip(chorale.voices, vocabularies):
        grid[voice.voice_index - 1] = [vocab.index_of(t) for t in voice.tokens]
    return grid


def grid_to_chorale(
    grid: np.ndarray, vocabularies: tuple[Vocabulary, ...], metadata: MetadataSeq
) -> Chorale:
    voices = tuple(
        VoiceSeq(v + 1, tuple(vocabularies[v].token_at(int(i)) for i in grid[v]))
        for v in range(N_VOICES)
    )
    return Chorale(voices, metadata)
