from __future__ import annotations

import numpy as np
import pytest

from choralegen.diagnostics import (
    NotAnOnset,
    StateSpaceTooLarge,
    ToyNetwork,
    build_chain,
    flip_distance,
    kolmogorov_check,
    novelty_report,
    run_suites,
    sampler_state_distribution,
    suite_blocks,
    suite_gibbs,
    suite_kolmogorov,
    suite_representation,
    total_variation,
)
from choralegen.ingest.corpus import ChoraleRecord, Corpus
from choralegen.pitch import Interval
from choralegen.score import HOLD, VoiceSeq, midi_pitch

from helpers import block_chorale, make_chorale


class TestToyNetwork:
    def test_single_cell_chain_rows_equal_conditional(self) -> None:
        toy = ToyNetwork.from_joint(np.array([0.3, 0.7]), 1, 1, 2, smoothing=0.0)
        chain = build_chain(toy)
        np.testing.assert_allclose(chain.matrix, [[0.3, 0.7], [0.3, 0.7]], atol=1e-15)
        np.testing.assert_allclose(chain.stationary, [0.3, 0.7], atol=1e-12)

    def test_uniform_joint_gives_uniform_stationary(self) -> None:
        toy = ToyNetwork.from_joint(np.ones(2**4), 2, 2, 2, smoothing=0.0)
        chain = build_chain(toy)
        np.testing.assert_allclose(chain.stationary, np.full(16, 1 / 16), atol=1e-12)

    def test_nonuniform_two_cell_joint_is_stationary(self) -> None:
        joint = np.array([0.5, 0.2, 0.2, 0.1])
        toy = ToyNetwork.from_joint(joint, 1, 2, 2, smoothing=0.0)
        chain = build_chain(toy)
        assert total_variation(chain.stationary, toy.joint) < 1e-10

    def test_rows_sum_to_one(self) -> None:
        toy = ToyNetwork.random_compatible(2, 3, 3, seed=1)
        chain = build_chain(toy)
        np.testing.assert_allclose(chain.matrix.sum(axis=1), 1.0, atol=1e-12)

    def test_conditional_normalized_and_matches_fiber(self) -> None:
        toy = ToyNetwork.random_compatible(2, 2, 3, seed=2)
        grid = np.array([[0, 1], [2, 0]])
        probs = toy.conditional(grid, 2, 1)
        assert probs.sum() == pytest.approx(1.0)
        # Manual fiber computation straight from the joint.
        values = []
        for token in range(3):
            trial = grid.copy()
            trial[1, 0] = token
            values.append(toy.joint[toy.state_index(trial)])
        np.testing.assert_allclose(probs, np.array(values) / sum(values), atol=1e-12)

    def test_manual_tables_mode(self) -> None:
        toy = ToyNetwork.incompatible_pair(
            np.array([[0.4, 0.1], [0.2, 0.3]]), np.array([[0.1, 0.4], [0.3, 0.2]])
        )
        grid = np.array([[0, 1]])
        probs = toy.conditional(grid, 1, 1)
        assert probs.sum() == pytest.approx(1.0)

    def test_state_space_caps(self) -> None:
        with pytest.raises(StateSpaceTooLarge):
            ToyNetwork.random_compatible(2, 8, 3, seed=0)  # 3^16 states
        toy = ToyNetwork.random_compatible(2, 4, 3, seed=0)  # 6561 enumerable
        with pytest.raises(StateSpaceTooLarge):
            build_chain(toy)  # but too large for a dense matrix

    def test_index_round_trip(self) -> None:
        toy = ToyNetwork.random_compatible(2, 3, 3, seed=3)
        rng = np.random.default_rng(0)
        for _ in range(20):
            grid = rng.integers(3, size=(2, 3))
            assert (toy.grid_of(toy.state_index(grid)) == grid).all()


class TestKolmogorov:
    def test_compatible_toys_reversible(self) -> None:
        for seed, shape in enumerate([(1, 2, 2), (2, 2, 2), (1, 3, 3), (2, 3, 2)]):
            toy = ToyNetwork.random_compatible(*shape, seed=seed)
            result = kolmogorov_check(build_chain(toy))
            assert result.reversible, f"shape {shape} misreported as irreversible"
            assert result.witness is None

    def test_incompatible_pair_witnessed(self) -> None:
        toy = ToyNetwork.incompatible_pair(
            np.array([[0.4, 0.1], [0.2, 0.3]]), np.array([[0.1, 0.4], [0.3, 0.2]])
        )
        chain = build_chain(toy)
        result = kolmogorov_check(chain)
        assert not result.reversible
        assert result.witness is not None and len(result.witness) >= 3
        # Re-verify the witness from the raw matrix, independent of the search.
        forward = backward = 1.0
        cycle = result.witness
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            forward *= chain.matrix[a, b]
            backward *= chain.matrix[b, a]
        assert forward == pytest.approx(result.forward_product)
        assert backward == pytest.approx(result.backward_product)
        assert abs(forward - backward) / max(forward, backward) > 1e-3

    def test_identity_like_chain_reversible(self) -> None:
        joint = np.zeros(8)
        joint[5] = 1.0
        toy = ToyNetwork.from_joint(joint, 1, 3, 2, smoothing=0.0)
        result = kolmogorov_check(build_chain(toy))
        assert result.reversible


class TestSamplerAgreement:
    def test_sampler_tracks_stationary_on_small_toy(self) -> None:
        toy = ToyNetwork.random_compatible(1, 3, 2, seed=5, temperature=0.5)
        chain = build_chain(toy)
        empirical = sampler_state_distribution(toy, events=30_000, seed=6)
        assert total_variation(empirical, chain.stationary) < 0.05


class TestFlipDistance:
    @pytest.mark.parametrize("duration", [1, 2, 4, 8, 16])
    def test_one_versus_run_length(self, duration: int) -> None:
        tokens = [midi_pitch(60)] + [HOLD] * (duration - 1) + [midi_pitch(64)]
        voice = VoiceSeq(1, tuple(tokens))
        assert flip_distance(voice, 1, midi_pitch(62)) == (1, duration)

    def test_mid_sequence_onset(self) -> None:
        tokens = [midi_pitch(60), HOLD, midi_pitch(64), HOLD, HOLD, HOLD, midi_pitch(60)]
        voice = VoiceSeq(1, tuple(tokens))
        assert flip_distance(voice, 3, midi_pitch(65)) == (1, 4)

    def test_hold_tick_rejected(self) -> None:
        voice = VoiceSeq(1, (midi_pitch(60), HOLD, HOLD))
        with pytest.raises(NotAnOnset):
            flip_distance(voice, 2, midi_pitch(62))


def brute_force_longest_common_run(a: list, b: list) -> int:
    best = 0
    for i in range(len(a)):
        for j in range(len(b)):
            k = 0
            while i + k < len(a) and j + k < len(b) and a[i + k] == b[j + k]:
                k += 1
            best = max(best, k)
    return best


class TestNovelty:
    def corpus(self) -> Corpus:
        pieces = [
            block_chorale([[72, 74, 76, 77], [67, 69, 71, 72], [60, 62, 64, 65], [48, 50, 52, 53]]),
            block_chorale([[79, 77, 76, 74], [74, 72, 71, 69], [67, 65, 64, 62], [55, 53, 52, 50]]),
        ]
        return Corpus(
            tuple(
                ChoraleRecord(piece, f"piece{i}", Interval(0, 0), "train")
                for i, piece in enumerate(pieces)
            )
        )

    def test_verbatim_copy_scores_full_length(self) -> None:
        corpus = self.corpus()
        copied = corpus.chorales[0]
        report = novelty_report(copied, corpus)
        for voice in report.per_voice:
            assert voice.match_length == copied.length
            assert voice.source_id == "piece0"

    def test_disjoint_tokens_score_zero(self) -> None:
        corpus = self.corpus()
        # No holds either: a shared hold token is a length-1 match.
        alien = block_chorale(
            [
                list(range(100, 116)),
                list(range(90, 106)),
                list(range(85, 101)),
                list(range(20, 36)),
            ],
            ticks_per_note=1,
        )
        report = novelty_report(alien, corpus)
        for voice in report.per_voice:
            assert voice.match_length == 0
            assert voice.source_id is None

    def test_shared_phrase_found_with_source(self) -> None:
        corpus = self.corpus()
        # Soprano of the generated piece copies an 8-tick phrase of piece1;
        # the flanking tokens are onsets so the match cannot extend.
        donor = corpus.chorales[1].voice(1).tokens[4:12]
        soprano = [midi_pitch(84), HOLD, HOLD, midi_pitch(83)] + list(donor) + [midi_pitch(84)] * 4
        other = [midi_pitch(40 + i) for i in range(16)]
        generated = make_chorale([soprano, other, list(reversed(other)), other])
        report = novelty_report(generated, corpus)
        soprano_result = report.per_voice[0]
        assert soprano_result.match_length == 8
        assert soprano_result.source_id == "piece1"
        # Brute-force all-pairs oracle agrees for every voice.
        for voice in report.per_voice:
            expected = max(
                brute_force_longest_common_run(
                    list(generated.voice(voice.voice_index).tokens),
                    list(record.chorale.voice(voice.voice_index).tokens),
                )
                for record in corpus.records
            )
            assert voice.match_length == expected


class TestSuites:
    def test_gibbs_suite_passes(self) -> None:
        records = suite_gibbs(seed=0, sampler_events=40_000)
        assert all(r.passed for r in records), [r.format() for r in records]

    def test_kolmogorov_suite_passes(self) -> None:
        records = suite_kolmogorov(seed=0)
        assert all(r.passed for r in records), [r.format() for r in records]

    def test_representation_suite_passes(self) -> None:
        assert all(r.passed for r in suite_representation())

    def test_blocks_suite_passes(self) -> None:
        assert all(r.passed for r in suite_blocks(seed=0, draws=20_000))

    def test_run_suites_rejects_unknown(self) -> None:
        with pytest.raises(ValueError):
            run_suites(["nonsense"])

    def test_records_format_as_tab_separated(self) -> None:
        record = suite_representation()[0]
        fields = record.format().split("\t")
        assert len(fields) == 5
        assert fields[1] in ("PASS", "FAIL")
