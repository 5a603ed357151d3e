from __future__ import annotations

import numpy as np
import pytest

from choralegen.models.features import META_PER_TICK, WindowCodec, dense_from_hot
from choralegen.score import HOLD, build_vocabularies, midi_pitch

from helpers import block_chorale, make_chorale


def fixture_chorale():
    return block_chorale(
        [[72, 74, 76, 72], [67, 65, 67, 69], [60, 62, 64, 60], [48, 43, 48, 50]],
        ticks_per_note=4,
    )


def expected_length(vocab_sizes: list[int], voice_index: int, delta_t: int) -> int:
    """Independent dimension count: window tokens + center tokens + metadata."""
    total = sum(vocab_sizes)
    return (
        2 * delta_t * total
        + (total - vocab_sizes[voice_index - 1])
        + (2 * delta_t + 1) * (1 + 4 + 15)
    )


class TestDimensions:
    def test_feature_length_matches_counting_script(self) -> None:
        chorale = fixture_chorale()
        vocabs = build_vocabularies([chorale])
        sizes = [len(v) for v in vocabs]
        for delta_t in (1, 2, 16):
            codec = WindowCodec(vocabs, delta_t)
            for voice_index in range(1, 5):
                assert codec.feature_length(voice_index) == expected_length(sizes, voice_index, delta_t)

    def test_group_counts_for_delta_two(self) -> None:
        chorale = fixture_chorale()
        codec = WindowCodec(build_vocabularies([chorale]), 2)
        # 4 voices over 2+2 window ticks plus 3 center voices.
        assert codec.token_group_count(1) == 4 * (2 + 2) + 3
        assert len(codec.fermata_positions(1)) == 2 * 2 + 1

    def test_each_onehot_group_sums_to_one(self) -> None:
        chorale = fixture_chorale()
        vocabs = build_vocabularies([chorale])
        codec = WindowCodec(vocabs, 2)
        x = codec.encode(chorale, 1, 5)
        sizes = [len(v) for v in vocabs]
        cursor = 0
        groups = [(dt, v) for dt in range(-2, 0) for v in range(4)]
        groups += [(dt, v) for dt in range(1, 3) for v in range(4)]
        groups += [(0, v) for v in range(4) if v != 0]
        for _, v in groups:
            assert x[cursor : cursor + sizes[v]].sum() == pytest.approx(1.0)
            cursor += sizes[v]
        for _ in range(5):  # one subdivision and one key one-hot per window tick
            assert x[cursor + 1 : cursor + 5].sum() == pytest.approx(1.0)
            assert x[cursor + 5 : cursor + META_PER_TICK].sum() == pytest.approx(1.0)
            cursor += META_PER_TICK
        assert cursor == codec.feature_length(1)


class TestMasking:
    def test_independent_of_target_cell_value(self) -> None:
        chorale = fixture_chorale()
        vocabs = build_vocabularies([chorale])
        codec = WindowCodec(vocabs, 2)
        altered = chorale.with_token(2, 6, midi_pitch(69))
        assert chorale.token_at(2, 6) != altered.token_at(2, 6)
        for tick in (1, 6, 16):
            if tick == 6:
                np.testing.assert_array_equal(
                    codec.encode(chorale, 2, 6), codec.encode(altered, 2, 6)
                )
        # Cells other than (2, 6) do see the change.
        assert not np.array_equal(codec.encode(chorale, 2, 5), codec.encode(altered, 2, 5))


class TestBoundaries:
    def test_left_block_is_all_pads_at_first_tick(self) -> None:
        chorale = fixture_chorale()
        vocabs = build_vocabularies([chorale])
        codec = WindowCodec(vocabs, 2)
        x = codec.encode(chorale, 1, 1)
        sizes = [len(v) for v in vocabs]
        cursor = 0
        for _ in range(2):  # two left window ticks
            for v in range(4):
                group = x[cursor : cursor + sizes[v]]
                assert group[vocabs[v].PAD_START_INDEX] == 1.0
                cursor += sizes[v]

    def test_right_block_is_all_pads_at_last_tick(self) -> None:
        chorale = fixture_chorale()
        vocabs = build_vocabularies([chorale])
        codec = WindowCodec(vocabs, 2)
        x = codec.encode(chorale, 1, chorale.length)
        sizes = [len(v) for v in vocabs]
        cursor = 2 * sum(sizes)  # skip the left block
        for _ in range(2):
            for v in range(4):
                group = x[cursor : cursor + sizes[v]]
                assert group[vocabs[v].PAD_END_INDEX] == 1.0
                cursor += sizes[v]

    def test_out_of_range_metadata_is_neutral(self) -> None:
        chorale = make_chorale(
            [[midi_pitch(72), HOLD] * 2, [midi_pitch(67), HOLD] * 2,
             [midi_pitch(60), HOLD] * 2, [midi_pitch(48), HOLD] * 2],
            fermata=[True, True, True, True],
            key_signature=3,
        )
        vocabs = build_vocabularies([chorale])
        codec = WindowCodec(vocabs, 2)
        x = codec.encode(chorale, 1, 1)
        meta_base = codec.feature_length(1) - 5 * META_PER_TICK
        first_window_tick = x[meta_base : meta_base + META_PER_TICK]  # tick -1
        assert first_window_tick[0] == 0.0  # no fermata outside the piece
        assert first_window_tick[1 + 2] == 1.0  # subdivision cycles to 3
        assert first_window_tick[5 + 7] == 1.0  # key one-hot centered at 0

    def test_encode_cells_matches_single_cell_encoding(self) -> None:
        chorale = fixture_chorale()
        vocabs = build_vocabularies([chorale])
        codec = WindowCodec(vocabs, 3)
        for voice_index in (1, 4):
            batch = codec.encode_cells(chorale, voice_index)
            m = codec.feature_length(voice_index)
            dense = dense_from_hot(
                batch.ones.astype(np.int64), batch.fermata, m, codec.fermata_positions(voice_index)
            )
            for tick in (1, 2, 7, 16):
                np.testing.assert_array_equal(dense[tick - 1], codec.encode(chorale, voice_index, tick))
            assert batch.targets[0] == vocabs[voice_index - 1].index_of(chorale.token_at(voice_index, 1))
