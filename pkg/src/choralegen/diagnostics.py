"""Desk-scale verification instruments for the sampling machinery.

Tiny "toy" networks with enumerable state spaces make the chain's behaviour
exactly computable: the single-site transition matrix, its stationary vector,
and Kolmogorov's reversibility criterion (every cycle's forward and backward
transition products agree).  Conditionals derived from one joint distribution
give a reversible chain whose stationary law is that joint; hand-built
incompatible conditionals give a chain that provably cannot match any joint.

Also here: the one-variable-versus-run-length representation measurement and
the corpus novelty report.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .ingest.corpus import Corpus
from .score import Chorale, NoteToken, VoiceSeq, to_piano_roll

STATE_SPACE_CAP = 60_000  # enumerable toys
DENSE_CHAIN_CAP = 2_500  # dense transition matrices
SMOOTHING = 1e-6


class StateSpaceTooLarge(ValueError):
    pass


class NotAnOnset(ValueError):
    pass


class ToyNetwork:
    """A miniature dependency network over an enumerable grid.

    Conditionals either derive exactly from an explicit joint table
    (compatible by construction) or are supplied per cell as arbitrary tables
    (possibly incompatible).  States are (n_voices, length) grids of token
    indices; flat state indices use row-major cell order.
    """

    def __init__(
        self,
        n_voices: int,
        length: int,
        n_tokens: int,
        joint: np.ndarray | None = None,
        tables: dict[tuple[int, int], np.ndarray] | None = None,
    ) -> None:
        self.n_voices = n_voices
        self.length = length
        self.n_tokens = n_tokens
        self.n_cells = n_voices * length
        self.n_states = n_tokens**self.n_cells
        if self.n_states > STATE_SPACE_CAP:
            raise StateSpaceTooLarge(f"{self.n_states} states exceed the {STATE_SPACE_CAP} cap")
        if (joint is None) == (tables is None):
            raise ValueError("give exactly one of joint or tables")
        if joint is not None:
            joint = np.asarray(joint, dtype=np.float64).reshape(-1)
            if joint.shape != (self.n_states,):
                raise ValueError(f"joint must have {self.n_states} entries")
            if (joint < 0).any() or joint.sum() <= 0:
                raise ValueError("joint must be a nonnegative measure")
            joint = joint / joint.sum()
        self.joint = joint
        self.tables = tables
        # Cell (voice0, tick0) at flat position voice0 * length + tick0.
        self.strides = np.array(
            [self.n_tokens ** (self.n_cells - 1 - c) for c in range(self.n_cells)], dtype=np.int64
        )

    @classmethod
    def from_joint(
        cls,
        joint: np.ndarray,
        n_voices: int,
        length: int,
        n_tokens: int,
        smoothing: float = SMOOTHING,
    ) -> ToyNetwork:
        """Analytic toy: conditionals match the (smoothed) joint exactly.

        The smoothing mixes in a little uniform mass so every conditional is
        strictly positive and the chain is irreducible; the toy's joint IS the
        smoothed one, so stationarity comparisons stay exact.
        """
        joint = np.asarray(joint, dtype=np.float64).reshape(-1)
        joint = joint / joint.sum()
        if smoothing:
            joint = (1.0 - smoothing) * joint + smoothing / joint.size
        return cls(n_voices, length, n_tokens, joint=joint)

    @classmethod
    def random_compatible(
        cls, n_voices: int, length: int, n_tokens: int, seed: int, temperature: float = 1.0
    ) -> ToyNetwork:
        rng = np.random.default_rng(seed)
        n_states = n_tokens ** (n_voices * length)
        energies = rng.standard_normal(n_states)
        joint = np.exp(energies / temperature)
        return cls.from_joint(joint, n_voices, length, n_tokens)

    @classmethod
    def concentrated_compatible(
        cls,
        n_voices: int,
        length: int,
        n_tokens: int,
        seed: int,
        marginal: tuple[float, ...] = (0.85, 0.10, 0.05),
        coupling_temperature: float = 5.0,
    ) -> ToyNetwork:
        """Product of skewed per-cell marginals times a mild random coupling.

        Concentrated enough that empirical state histograms settle quickly,
        coupled enough that conditionals genuinely depend on their context;
        the shape of choice for finite-sample convergence checks.
        """
        if len(marginal) != n_tokens:
            raise ValueError("marginal must have one weight per token")
        n_cells = n_voices * length
        shape = (n_tokens,) * n_cells
        joint = np.ones(shape)
        for c in range(n_cells):
            view: list = [None] * n_cells
            view[c] = slice(None)
            joint = joint * np.asarray(marginal, dtype=np.float64)[tuple(view)]
        rng = np.random.default_rng(seed)
        joint = joint * np.exp(
            rng.standard_normal(joint.size).reshape(shape) / coupling_temperature
        )
        return cls.from_joint(joint.reshape(-1), n_voices, length, n_tokens)

    @classmethod
    def incompatible_pair(
        cls, first_joint: np.ndarray, second_joint: np.ndarray, smoothing: float = SMOOTHING
    ) -> ToyNetwork:
        """Two binary cells whose conditionals come from different joints:
        p(x1 | x2) from the first, p(x2 | x1) from the second."""
        j1 = np.asarray(first_joint, dtype=np.float64)
        j2 = np.asarray(second_joint, dtype=np.float64)
        if j1.shape != (2, 2) or j2.shape != (2, 2):
            raise ValueError("both joints must be 2x2")
        j1, j2 = j1 / j1.sum(), j2 / j2.sum()
        if smoothing:
            j1 = (1.0 - smoothing) * j1 + smoothing / 4
            j2 = (1.0 - smoothing) * j2 + smoothing / 4
        toy = cls(1, 2, 2, tables={})
        table_first = np.zeros((4, 2))
        table_second = np.zeros((4, 2))
        for x1 in range(2):
            for x2 in range(2):
                index = 2 * x1 + x2
                table_first[index] = j1[:, x2] / j1[:, x2].sum()  # p(x1 | x2)
                table_second[index] = j2[x1, :] / j2[x1, :].sum()  # p(x2 | x1)
        toy.tables = {(0, 0): table_first, (0, 1): table_second}
        return toy

    def state_index(self, grid: np.ndarray) -> int:
        return int(self.strides @ grid.reshape(-1))

    def grid_of(self, index: int) -> np.ndarray:
        digits = []
        for _ in range(self.n_cells):
            digits.append(index % self.n_tokens)
            index //= self.n_tokens
        return np.array(digits[::-1], dtype=np.int64).reshape(self.n_voices, self.length)

    def conditional(self, grid: np.ndarray, voice: int, tick: int) -> np.ndarray:
        """p(cell token | all other cells); voice and tick are 1-based."""
        cell = (voice - 1) * self.length + (tick - 1)
        index = self.state_index(grid)
        if self.joint is not None:
            base = index - int(grid[voice - 1, tick - 1]) * self.strides[cell]
            fiber = base + np.arange(self.n_tokens) * self.strides[cell]
            values = self.joint[fiber]
            total = values.sum()
            if total <= 0:
                return np.full(self.n_tokens, 1.0 / self.n_tokens)
            return values / total
        return self.tables[(voice - 1, tick - 1)][index]


@dataclass
class ChainMatrix:
    """Single-site chain over the full state space, with its stationary vector."""

    matrix: np.ndarray
    stationary: np.ndarray
    toy: ToyNetwork


def build_chain(toy: ToyNetwork, tolerance: float = 1e-12) -> ChainMatrix:
    """Transition matrix of the uniform-cell-choice resampling chain.

    Entry (s, s') sums, over the cells whose update turns s into s', the
    conditional probability of s''s token there, divided by the cell count;
    self-transitions accumulate on the diagonal.
    """
    n_states = toy.n_states
    if n_states > DENSE_CHAIN_CAP:
        raise StateSpaceTooLarge(
            f"{n_states} states exceed the dense-chain cap of {DENSE_CHAIN_CAP}"
        )
    n = toy.n_tokens
    cells = toy.n_cells
    indices = np.arange(n_states, dtype=np.int64)

    # states[s, c] = token of cell c in state s (mixed-radix digits).
    states = np.empty((n_states, cells), dtype=np.int64)
    rest = indices.copy()
    for c in range(cells - 1, -1, -1):
        states[:, c] = rest % n
        rest //= n

    matrix = np.zeros((n_states, n_states))
    rows = indices[:, None]
    for c in range(cells):
        base = indices - states[:, c] * toy.strides[c]
        fiber = base[:, None] + np.arange(n, dtype=np.int64)[None, :] * toy.strides[c]
        if toy.joint is not None:
            values = toy.joint[fiber]
            totals = values.sum(axis=1, keepdims=True)
            safe = np.where(totals > 0, totals, 1.0)
            probs = np.where(totals > 0, values / safe, 1.0 / n)
        else:
            voice0, tick0 = divmod(c, toy.length)
            probs = toy.tables[(voice0, tick0)][indices]
        np.add.at(matrix, (np.broadcast_to(rows, fiber.shape), fiber), probs / cells)

    stationary = _power_iteration(matrix, tolerance)
    return ChainMatrix(matrix=matrix, stationary=stationary, toy=toy)


def _power_iteration(matrix: np.ndarray, tolerance: float, max_iterations: int = 500_000) -> np.ndarray:
    pi = np.full(matrix.shape[0], 1.0 / matrix.shape[0])
    for _ in range(max_iterations):
        updated = pi @ matrix
        updated /= updated.sum()
        if np.abs(updated - pi).sum() < tolerance:
            # A few polishing sweeps push the residual well below the stop
            # criterion, so relative tests downstream sit inside their bands.
            for _ in range(100):
                updated = updated @ matrix
                updated /= updated.sum()
            return updated
        pi = updated
    raise RuntimeError(f"power iteration did not reach {tolerance} in {max_iterations} steps")


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


@dataclass
class KolmogorovResult:
    reversible: bool
    witness: list[int] | None  # state cycle s1, ..., sk (closing to s1)
    max_edge_deviation: float
    witness_deviation: float = 0.0
    forward_product: float = 0.0
    backward_product: float = 0.0


def kolmogorov_check(
    chain: ChainMatrix, cycle_budget: int = 50_000, tolerance: float = 1e-9
) -> KolmogorovResult:
    """Reversibility via detailed balance on every edge, with a witness cycle
    (unequal forward/backward transition products) when the chain fails.

    Three-cycles live inside one cell's fiber; four-cycles are two-cell
    rectangles; both families are enumerated exhaustively before any random
    search, which makes the witness exact on toy chains.
    """
    matrix = chain.matrix
    pi = chain.stationary
    flow = pi[:, None] * matrix
    asymmetry = np.abs(flow - flow.T)
    # Asymmetries at the power-iteration residue scale are numerics, not flow.
    asymmetry[asymmetry <= 1e-13] = 0.0
    scale = np.maximum(np.maximum(flow, flow.T), 1e-300)
    deviation = asymmetry / scale
    max_edge_deviation = float(deviation.max())
    if max_edge_deviation <= tolerance:
        return KolmogorovResult(True, None, max_edge_deviation)

    witness, dev, fwd, bwd = _search_witness_cycle(chain, cycle_budget, tolerance)
    return KolmogorovResult(False, witness, max_edge_deviation, dev, fwd, bwd)


def _search_witness_cycle(
    chain: ChainMatrix, budget: int, tolerance: float
) -> tuple[list[int] | None, float, float, float]:
    toy = chain.toy
    matrix = chain.matrix
    n = toy.n_tokens
    best: tuple[float, list[int], float, float] | None = None
    seen = 0

    def consider(cycle: list[int]) -> None:
        nonlocal best
        forward = 1.0
        backward = 1.0
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            forward *= matrix[a, b]
            backward *= matrix[b, a]
        if forward <= 0.0 and backward <= 0.0:
            return
        dev = abs(forward - backward) / max(forward, backward, 1e-300)
        if dev > tolerance and (best is None or dev > best[0]):
            best = (dev, cycle, forward, backward)

    fibers = _cell_fibers(toy)
    if n >= 3:  # 3-cycles: three distinct tokens of one cell, rest fixed
        for fiber in fibers:
            for i in range(n):
                for j in range(n):
                    for k in range(n):
                        if len({i, j, k}) == 3:
                            consider([fiber[i], fiber[j], fiber[k]])
                            seen += 1
                            if seen >= budget:
                                return _best_or_none(best)
    # 4-cycles: rectangles over two distinct cells
    for c1 in range(toy.n_cells):
        for c2 in range(c1 + 1, toy.n_cells):
            stride1, stride2 = int(toy.strides[c1]), int(toy.strides[c2])
            for base in _rest_bases(toy, c1, c2):
                for x1 in range(n):
                    for y1 in range(n):
                        if x1 == y1:
                            continue
                        for x2 in range(n):
                            for y2 in range(n):
                                if x2 == y2:
                                    continue
                                s00 = base + x1 * stride1 + x2 * stride2
                                s10 = base + y1 * stride1 + x2 * stride2
                                s11 = base + y1 * stride1 + y2 * stride2
                                s01 = base + x1 * stride1 + y2 * stride2
                                consider([s00, s10, s11, s01])
                                seen += 1
                                if seen >= budget:
                                    return _best_or_none(best)
    return _best_or_none(best)


def _best_or_none(best: tuple[float, list[int], float, float] | None):
    if best is None:
        return None, 0.0, 0.0, 0.0
    dev, cycle, fwd, bwd = best
    return cycle, dev, fwd, bwd


def _cell_fibers(toy: ToyNetwork) -> list[np.ndarray]:
    fibers = []
    offsets = np.arange(toy.n_tokens, dtype=np.int64)
    for c in range(toy.n_cells):
        for base in _rest_bases_single(toy, c):
            fibers.append(base + offsets * toy.strides[c])
    return fibers


def _rest_bases_single(toy: ToyNetwork, cell: int) -> np.ndarray:
    indices = np.arange(toy.n_states, dtype=np.int64)
    digits = (indices // toy.strides[cell]) % toy.n_tokens
    return np.unique(indices - digits * toy.strides[cell])


def _rest_bases(toy: ToyNetwork, c1: int, c2: int) -> np.ndarray:
    indices = np.arange(toy.n_states, dtype=np.int64)
    d1 = (indices // toy.strides[c1]) % toy.n_tokens
    d2 = (indices // toy.strides[c2]) % toy.n_tokens
    return np.unique(indices - d1 * toy.strides[c1] - d2 * toy.strides[c2])


def flip_distance(voice: VoiceSeq, tick: int, new_pitch: NoteToken) -> tuple[int, int]:
    """Single-variable edits needed to change one note's pitch, rhythm kept:
    in the hold encoding versus the piano-roll encoding.

    Measured by constructing both encodings before and after the change and
    counting differing positions; a held note of duration d gives (1, d).
    """
    token = voice.token_at(tick)
    if not token.is_pitch:
        raise NotAnOnset(f"tick {tick} holds a {token.kind} token, not a note onset")
    if not new_pitch.is_pitch:
        raise ValueError("replacement must be a pitch token")

    duration = 1
    for later in voice.tokens[tick:]:
        if not later.is_hold:
            break
        duration += 1

    changed_tokens = list(voice.tokens)
    changed_tokens[tick - 1] = new_pitch
    changed = VoiceSeq(voice.voice_index, tuple(changed_tokens))

    hold_changes = sum(1 for a, b in zip(voice.tokens, changed.tokens) if a != b)
    roll_before = to_piano_roll(voice)
    roll_after = to_piano_roll(changed)
    roll_changes = sum(1 for a, b in zip(roll_before, roll_after) if a != b)
    return hold_changes, roll_changes


@dataclass
class VoiceNovelty:
    voice_index: int
    match_length: int
    source_id: str | None


@dataclass
class NoveltyReport:
    per_voice: list[VoiceNovelty]

    @property
    def longest(self) -> int:
        return max(v.match_length for v in self.per_voice)


def novelty_report(generated: Chorale, corpus: Corpus) -> NoveltyReport:
    """Longest contiguous token run each voice shares with any corpus piece.

    Exact, via a suffix automaton of the generated voice streamed against
    every corpus chorale; ties resolve to the first source in (source id,
    transposition) order.
    """
    if corpus.records and generated.encoding_mode != corpus.encoding_mode:
        raise ValueError(
            f"encoding mismatch: generated {generated.encoding_mode}, corpus {corpus.encoding_mode}"
        )
    results = []
    ordered = sorted(corpus.records, key=lambda r: (r.source_id, r.transposition.semitones))
    for voice in generated.voices:
        automaton = _SuffixAutomaton(voice.tokens)
        best_length = 0
        best_source: str | None = None
        for record in ordered:
            length = automaton.longest_common_run(record.chorale.voice(voice.voice_index).tokens)
            if length > best_length:
                best_length = length
                best_source = record.source_id
        results.append(VoiceNovelty(voice.voice_index, best_length, best_source))
    return NoveltyReport(results)


class _SuffixAutomaton:
    """Suffix automaton over a token sequence; answers longest-common-substring."""

    def __init__(self, sequence: Iterable[NoteToken]) -> None:
        self.transitions: list[dict[NoteToken, int]] = [{}]
        self.link: list[int] = [-1]
        self.length: list[int] = [0]
        last = 0
        for token in sequence:
            last = self._extend(last, token)

    def _extend(self, last: int, token: NoteToken) -> int:
        current = len(self.length)
        self.transitions.append({})
        self.length.append(self.length[last] + 1)
        self.link.append(-1)
        p = last
        while p != -1 and token not in self.transitions[p]:
            self.transitions[p][token] = current
            p = self.link[p]
        if p == -1:
            self.link[current] = 0
            return current
        q = self.transitions[p][token]
        if self.length[p] + 1 == self.length[q]:
            self.link[current] = q
            return current
        clone = len(self.length)
        self.transitions.append(dict(self.transitions[q]))
        self.length.append(self.length[p] + 1)
        self.link.append(self.link[q])
        while p != -1 and self.transitions[p].get(token) == q:
            self.transitions[p][token] = clone
            p = self.link[p]
        self.link[q] = clone
        self.link[current] = clone
        return current

    def longest_common_run(self, other: Iterable[NoteToken]) -> int:
        node = 0
        length = 0
        best = 0
        for token in other:
            while node != 0 and token not in self.transitions[node]:
                node = self.link[node]
                length = self.length[node]
            if token in self.transitions[node]:
                node = self.transitions[node][token]
                length += 1
            else:
                node = 0
                length = 0
            best = max(best, length)
        return best


@dataclass
class CheckRecord:
    """One verification outcome for the structured diagnostics report."""

    name: str
    passed: bool
    metric: float
    tolerance: float
    detail: str = ""

    def format(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{self.name}\t{verdict}\t{self.metric:.3e}\t{self.tolerance:.3e}\t{self.detail}"


def sampler_state_distribution(
    toy: ToyNetwork, events: int, seed: int, n_chains: int = 100
) -> np.ndarray:
    """Empirical state distribution of the real sampler run on a toy.

    The event budget is split over independent chains (uniform random start,
    first quarter of each chain discarded as burn-in, every later visited
    state counted).  Independent chains keep the histogram's effective sample
    size from being throttled by within-chain autocorrelation; the burn-in
    comes out of the stated budget, not on top of it.
    """
    from .sampler import SamplerConfig, SamplerStats, run_grid

    per_chain = events // n_chains
    burn_in = per_chain // 4
    free = [(v, t) for v in range(1, toy.n_voices + 1) for t in range(1, toy.length + 1)]
    counts = np.zeros(toy.n_states)
    stats = SamplerStats()
    burn_config = SamplerConfig(max_iterations=burn_in, seed=seed)
    step_config = SamplerConfig(max_iterations=1, seed=seed)

    for chain_index in range(n_chains):
        rng = np.random.default_rng([seed, chain_index])
        state = rng.integers(toy.n_tokens, size=(toy.n_voices, toy.length))
        state = run_grid(state, toy.conditional, free, lambda cell: None, burn_config, rng, stats)
        for _ in range(per_chain - burn_in):
            state = run_grid(state, toy.conditional, free, lambda cell: None, step_config, rng, stats)
            counts[toy.state_index(state)] += 1.0
    return counts / counts.sum()


def suite_gibbs(seed: int = 0, sampler_events: int = 100_000) -> list[CheckRecord]:
    """Exact-chain and sampled-chain agreement on a compatible toy."""
    toy = ToyNetwork.concentrated_compatible(2, 3, 3, seed=42)
    chain = build_chain(toy)
    tv_exact = total_variation(chain.stationary, toy.joint)
    records = [
        CheckRecord(
            "gibbs.stationary_matches_joint", tv_exact < 1e-8, tv_exact, 1e-8,
            "total variation, exact linear algebra",
        )
    ]
    rows_ok = float(np.abs(chain.matrix.sum(axis=1) - 1.0).max())
    records.append(
        CheckRecord("gibbs.rows_sum_to_one", rows_ok < 1e-12, rows_ok, 1e-12, "")
    )
    empirical = sampler_state_distribution(toy, sampler_events, seed=seed + 1)
    tv_empirical = total_variation(empirical, chain.stationary)
    records.append(
        CheckRecord(
            "gibbs.sampler_matches_stationary", tv_empirical < 0.05, tv_empirical, 0.05,
            f"total variation over {toy.n_states} states, {sampler_events} events",
        )
    )
    return records


def suite_kolmogorov(seed: int = 0) -> list[CheckRecord]:
    records = []
    for n, (voices, length, tokens) in enumerate([(2, 2, 2), (1, 3, 3), (2, 3, 2)]):
        toy = ToyNetwork.random_compatible(voices, length, tokens, seed=seed + n)
        result = kolmogorov_check(build_chain(toy))
        records.append(
            CheckRecord(
                f"kolmogorov.compatible_{voices}v{length}t{tokens}n_reversible",
                result.reversible,
                result.max_edge_deviation,
                1e-9,
                "max detailed-balance deviation",
            )
        )
    toy = ToyNetwork.incompatible_pair(
        np.array([[0.4, 0.1], [0.2, 0.3]]), np.array([[0.1, 0.4], [0.3, 0.2]])
    )
    result = kolmogorov_check(build_chain(toy))
    confirmed = (
        not result.reversible
        and result.witness is not None
        and len(result.witness) >= 3
        and result.witness_deviation > 1e-3
    )
    records.append(
        CheckRecord(
            "kolmogorov.incompatible_pair_witnessed",
            confirmed,
            result.witness_deviation,
            1e-3,
            f"cycle {result.witness}, forward {result.forward_product:.3e} vs backward {result.backward_product:.3e}",
        )
    )
    return records


def suite_representation() -> list[CheckRecord]:
    from .score import HOLD, VoiceSeq, midi_pitch

    records = []
    for duration in (1, 2, 4, 8, 16):
        tokens = [midi_pitch(60)] + [HOLD] * (duration - 1) + [midi_pitch(64), HOLD]
        voice = VoiceSeq(1, tuple(tokens))
        hold_changes, roll_changes = flip_distance(voice, 1, midi_pitch(62))
        ok = (hold_changes, roll_changes) == (1, duration)
        records.append(
            CheckRecord(
                f"representation.flip_distance_d{duration}",
                ok,
                float(roll_changes),
                float(duration),
                "piano-roll edits for one pitch change",
            )
        )
    return records


def suite_blocks(seed: int = 0, draws: int = 20_000) -> list[CheckRecord]:
    from itertools import combinations

    from scipy import stats as scipy_stats

    from .sampler import pick_block

    rng = np.random.default_rng(seed)
    valid = [(a, b) for a, b in combinations(range(1, 11), 2) if b - a >= 5]
    counts = dict.fromkeys(valid, 0)
    distance_ok = True
    for _ in range(draws):
        cells = pick_block(10, 5, 2, frozen=[], rng=rng)
        ticks = tuple(sorted(t for _, t in cells))
        if len(ticks) != 2 or ticks[1] - ticks[0] < 5:
            distance_ok = False
            break
        counts[ticks] += 1
    records = [
        CheckRecord("blocks.pairwise_distance_invariant", distance_ok, float(distance_ok), 1.0, "")
    ]
    if distance_ok:
        _, p_value = scipy_stats.chisquare(list(counts.values()))
        records.append(
            CheckRecord(
                "blocks.valid_pairs_equally_sampled", p_value > 0.01, p_value, 0.01,
                f"chi-square over {len(valid)} pairs, {draws} draws",
            )
        )
    return records


SUITES = {
    "gibbs": suite_gibbs,
    "kolmogorov": suite_kolmogorov,
    "representation": suite_representation,
    "blocks": suite_blocks,
}


def run_suites(names: Iterable[str] | None = None) -> list[CheckRecord]:
    chosen = list(names) if names else list(SUITES)
    records: list[CheckRecord] = []
    for name in chosen:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
        records.extend(SUITES[name]())
    return records
