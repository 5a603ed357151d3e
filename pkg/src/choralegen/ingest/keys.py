"""Per-bar key-signature estimation via Krumhansl-Schmuckler profile correlation.

Each 16-tick bar gets the sharp count (-7..7) of its most likely key: the bar's
pitch-class duration histogram is correlated against the 24 rotated
Krumhansl-Kessler profiles and the winner's signature is taken (minor keys use
their relative major's signature).
"""

from __future__ import annotations

import numpy as np

from ..score import Chorale, to_piano_roll

BAR_TICKS = 16

# Krumhansl-Kessler probe-tone profiles (major and minor), indexed from the tonic.
MAJOR_PROFILE = np.array(
    [6.35, 2.23, 3.48, 2.33, 4.38, 4.09, 2.52, 5.19, 2.39, 3.66, 2.29, 2.88]
)
MINOR_PROFILE = np.array(
    [6.33, 2.68, 3.52, 5.38, 2.60, 3.53, 2.54, 4.75, 3.98, 2.69, 3.34, 3.17]
)


def fifths_of_major(tonic_pc: int) -> int:
    """Sharps in the signature of the major key on a pitch class (Db for C#, etc.)."""
    return (7 * tonic_pc + 5) % 12 - 5


def fifths_of_minor(tonic_pc: int) -> int:
    """Minor keys take their relative major's signature."""
    return fifths_of_major((tonic_pc + 3) % 12)


def _profile_matrix() -> np.ndarray:
    """24 x 12 matrix: major profiles rotated to every tonic, then minor ones."""
    rows = [np.roll(MAJOR_PROFILE, tonic) for tonic in range(12)]
    rows += [np.roll(MINOR_PROFILE, tonic) for tonic in range(12)]
    return np.stack(rows)


_PROFILES = _profile_matrix()
_FIFTHS = np.array(
    [fifths_of_major(pc) for pc in range(12)] + [fifths_of_minor(pc) for pc in range(12)]
)


def pitch_class_durations(rolls: list[list[int]], start: int, end: int) -> np.ndarray:
    """Sounding ticks per pitch class over [start, end) across all voices."""
    histogram = np.zeros(12)
    for roll in rolls:
        for tick in range(start, min(end, len(roll))):
            histogram[roll[tick] % 12] += 1.0
    return histogram


def best_key_fifths(histogram: np.ndarray) -> int | None:
    """Signature of the best-correlated key, or None for a degenerate histogram."""
    if histogram.std() == 0:
        return None
    correlations = np.array(
        [np.corrcoef(histogram, profile)[0, 1] for profile in _PROFILES]
    )
    return int(_FIFTHS[int(np.argmax(correlations))])


def estimate_key_signatures(chorale: Chorale) -> tuple[int, ...]:
    """Per-tick sharp counts, constant within each 16-tick bar.

    Bars whose tokens are all holds inherit the previous bar's value; a first
    bar without a usable histogram falls back to the whole-piece estimate.
    """
    length = chorale.length
    rolls = [to_piano_roll(voice) for voice in chorale.voices]

    whole = best_key_fifths(pitch_class_durations(rolls, 0, length))
    previous = whole if whole is not None else 0

    per_tick: list[int] = []
    for start in range(0, length, BAR_TICKS):
        end = min(start + BAR_TICKS, length)
        all_hold = all(
            token.is_hold
            for voice in chorale.voices
            for token in voice.tokens[start:end]
        )
        if all_hold:
            fifths = previous
        else:
            estimate = best_key_fifths(pitch_class_durations(rolls, start, end))
            fifths = estimate if estimate is not None else previous
        fifths = max(-7, min(7, fifths))
        per_tick.extend([fifths] * (end - start))
        previous = fifths
    return tuple(per_tick)
