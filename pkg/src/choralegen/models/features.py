"""Context-window feature encoding for the per-voice classifiers.

The features for cell (voice i, tick t) are the one-hot encoded tokens of all
four voices over the surrounding window, the other three voices at t itself,
and per-tick metadata over the window.  The target cell's own token never
enters the vector, so predictions cannot depend on the value being resampled.

Ticks outside [1, T] contribute pad tokens and neutral metadata (no fermata,
subdivision by the cyclic formula, key signature 0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..score import Chorale, Vocabulary, chorale_to_grid

META_PER_TICK = 1 + 4 + 15  # fermata bit, subdivision one-hot, key-signature one-hot
KEY_OFFSET = 7  # key signature k lives at one-hot position k + 7


@dataclass
class CellBatch:
    """Hot encodings for every tick of one voice: row t-1 describes cell (voice, t)."""

    ones: np.ndarray  # (T, G) int32, feature positions that are exactly 1
    fermata: np.ndarray  # (T, W) float64, values for the fermata positions
    targets: np.ndarray  # (T,) int64, the cell's own token index


class WindowCodec:
    """Maps (chorale, voice, tick) to fixed-length feature vectors.

    The layout per target voice: all four voices over the left window ticks,
    then over the right window ticks, then the other three voices at the
    center tick, then metadata blocks for each window tick.
    """

    def __init__(self, vocabularies: tuple[Vocabulary, ...], delta_t: int) -> None:
        if delta_t < 1:
            raise ValueError("delta_t must be at least 1")
        self.vocabularies = tuple(vocabularies)
        self.delta_t = delta_t
        self.sizes = [len(v) for v in self.vocabularies]
        window = 2 * delta_t + 1

        self._groups: list[list[tuple[int, int]]] = []  # per voice: (dt, voice0)
        self._offsets: list[np.ndarray] = []
        self._meta_base: list[int] = []
        self._lengths: list[int] = []
        self._fermata_positions: list[np.ndarray] = []
        self._group_dt: list[np.ndarray] = []
        self._group_voice: list[np.ndarray] = []

        for i0 in range(4):
            groups = [(dt, v) for dt in range(-delta_t, 0) for v in range(4)]
            groups += [(dt, v) for dt in range(1, delta_t + 1) for v in range(4)]
            groups += [(0, v) for v in range(4) if v != i0]
            offsets = np.zeros(len(groups), dtype=np.int64)
            total = 0
            for g, (_, v) in enumerate(groups):
                offsets[g] = total
                total += self.sizes[v]
            meta_base = total
            total += window * META_PER_TICK
            self._groups.append(groups)
            self._offsets.append(offsets)
            self._meta_base.append(meta_base)
            self._lengths.append(total)
            self._fermata_positions.append(
                meta_base + np.arange(window, dtype=np.int64) * META_PER_TICK
            )
            self._group_dt.append(np.array([dt for dt, _ in groups], dtype=np.int64))
            self._group_voice.append(np.array([v for _, v in groups], dtype=np.int64))

    def feature_length(self, voice_index: int) -> int:
        return self._lengths[voice_index - 1]

    def fermata_positions(self, voice_index: int) -> np.ndarray:
        return self._fermata_positions[voice_index - 1]

    def token_group_count(self, voice_index: int) -> int:
        return len(self._groups[voice_index - 1])

    def hot_cell(
        self,
        grid: np.ndarray,
        fermata: np.ndarray,
        keys: np.ndarray,
        voice_index: int,
        tick: int,
    ) -> tuple[np.ndarray, np.ndarray]:
        """(always-one positions, fermata values) for one cell; the hot path for sampling."""
        i0 = voice_index - 1
        t0 = tick - 1
        length = grid.shape[1]
        dts = self._group_dt[i0]
        voices = self._group_voice[i0]

        ticks = t0 + dts
        clipped = np.clip(ticks, 0, length - 1)
        tokens = grid[voices, clipped]
        tokens = np.where(ticks < 0, Vocabulary.PAD_START_INDEX, tokens)
        tokens = np.where(ticks >= length, Vocabulary.PAD_END_INDEX, tokens)
        token_ones = self._offsets[i0] + tokens

        window = np.arange(-self.delta_t, self.delta_t + 1, dtype=np.int64)
        wticks = t0 + window
        base = self._meta_base[i0] + (window + self.delta_t) * META_PER_TICK
        subdiv = (t0 + window) % 4  # cyclic formula, valid outside [1, T] too
        subdiv_ones = base + 1 + subdiv
        inside = (wticks >= 0) & (wticks < length)
        key_values = np.where(inside, keys[np.clip(wticks, 0, length - 1)], 0)
        key_ones = base + 5 + (key_values + KEY_OFFSET)
        fermata_values = np.where(inside, fermata[np.clip(wticks, 0, length - 1)], False)

        ones = np.concatenate([token_ones, subdiv_ones, key_ones])
        return ones, fermata_values.astype(np.float64)

    def encode(self, chorale: Chorale, voice_index: int, tick: int) -> np.ndarray:
        """Dense feature vector for one cell of a chorale."""
        grid = chorale_to_grid(chorale, self.vocabularies)
        fermata = np.array(chorale.metadata.fermata, dtype=bool)
        keys = np.array(chorale.metadata.key_signature, dtype=np.int64)
        ones, ferm = self.hot_cell(grid, fermata, keys, voice_index, tick)
        x = np.zeros(self.feature_length(voice_index))
        x[ones] = 1.0
        x[self.fermata_positions(voice_index)] = ferm
        return x

    def encode_cells(self, chorale: Chorale, voice_index: int) -> CellBatch:
        """Hot encodings for all T cells of one voice, vectorized over ticks."""
        i0 = voice_index - 1
        grid = chorale_to_grid(chorale, self.vocabularies)
        length = chorale.length
        dt = self.delta_t

        padded = np.empty((4, length + 2 * dt), dtype=np.int64)
        padded[:, :dt] = Vocabulary.PAD_START_INDEX
        padded[:, dt : dt + length] = grid
        padded[:, dt + length :] = Vocabulary.PAD_END_INDEX

        groups = self._groups[i0]
        ones = np.empty((length, len(groups) + 2 * (2 * dt + 1)), dtype=np.int64)
        for g, (gdt, v) in enumerate(groups):
            ones[:, g] = self._offsets[i0][g] + padded[v, dt + gdt : dt + gdt + length]

        window = np.arange(-dt, dt + 1, dtype=np.int64)
        base = self._meta_base[i0] + (window + dt) * META_PER_TICK
        t0s = np.arange(length, dtype=np.int64)[:, None]
        wticks = t0s + window[None, :]
        g0 = len(groups)
        ones[:, g0 : g0 + 2 * dt + 1] = base[None, :] + 1 + (wticks % 4)

        keys = np.array(chorale.metadata.key_signature, dtype=np.int64)
        padded_keys = np.zeros(length + 2 * dt, dtype=np.int64)
        padded_keys[dt : dt + length] = keys
        key_values = padded_keys[wticks + dt]
        ones[:, g0 + 2 * dt + 1 :] = base[None, :] + 5 + (key_values + KEY_OFFSET)

        fermata = np.zeros(length + 2 * dt, dtype=bool)
        fermata[dt : dt + length] = np.array(chorale.metadata.fermata, dtype=bool)
        ferm = fermata[wticks + dt].astype(np.float64)

        return CellBatch(ones=ones.astype(np.int32), fermata=ferm, targets=grid[i0].copy())


def dense_from_hot(
    ones: np.ndarray, fermata: np.ndarray, length: int, fermata_positions: np.ndarray
) -> np.ndarray:
    """Materialize dense rows from hot encodings; accepts one row or a batch."""
    single = ones.ndim == 1
    ones2 = ones[None, :] if single else ones
    ferm2 = fermata[None, :] if single else fermata
    x = np.zeros((ones2.shape[0], length))
    x[np.arange(ones2.shape[0])[:, None], ones2] = 1.0
    x[:, fermata_positions] = ferm2
    return x[0] if single else x
