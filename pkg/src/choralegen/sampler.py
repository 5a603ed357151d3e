"""Gibbs-style resampling of score cells from per-voice conditional models.

The chain visits one non-frozen cell at a time (chosen uniformly), redraws its
token from the voice's conditional distribution restricted to the cell's
allowed set, and repeats for a fixed budget of update events.  Block mode
redraws several cells per round against a snapshot of the pre-round state,
with tick distances kept at least min_distance apart so no cell conditions on
a simultaneously updated same-tick neighbour.

The core loop works on integer token grids and an abstract conditional
function; the chorale-facing wrappers add the music rules (pads are never
written, tick 1 never becomes a hold).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .models.training import ConditionalModelSet
from .score import (
    Chorale,
    MetadataSeq,
    NoteToken,
    Vocabulary,
    chorale_to_grid,
    grid_to_chorale,
)

Cell = tuple[int, int]  # (voice_index 1..4, tick 1..T)


class MissingFrozenValue(ValueError):
    """A frozen cell has no value: the caller must supply a seed chorale."""


class ZeroMassConstraint(RuntimeError):
    """The model put (numerically) no mass on an allowed set.  Runs never raise
    this: they fall back to a uniform draw over the allowed set and count the
    event in the run stats."""


class InfeasibleBlock(RuntimeError):
    """No placement of block_size ticks at the required distance was found."""


class ConstraintSet:
    """Per-cell allowed token sets and cells that are never resampled.

    allowed maps (voice, tick) to a non-empty collection of tokens; absent
    cells are unconstrained.  frozen cells keep the value of the seed chorale.
    """

    def __init__(
        self,
        allowed: Mapping[Cell, Iterable[NoteToken]] | None = None,
        frozen: Iterable[Cell] = (),
    ) -> None:
        self.allowed: dict[Cell, frozenset[NoteToken]] = {}
        for cell, tokens in (allowed or {}).items():
            tokens = frozenset(tokens)
            if not tokens:
                raise ValueError(f"allowed set at {cell} is empty")
            if any(t.is_pad for t in tokens):
                raise ValueError(f"allowed set at {cell} contains pad tokens")
            self.allowed[cell] = tokens
        self.frozen = frozenset(frozen)

    @classmethod
    def none(cls) -> ConstraintSet:
        return cls()

    def allowed_at(self, cell: Cell) -> frozenset[NoteToken] | None:
        return self.allowed.get(cell)


@dataclass(frozen=True)
class SamplerConfig:
    max_iterations: int | None = None  # None: 100 x number of free cells
    init: str = "uniform"  # or "marginal"
    seed: int = 0
    block_size: int = 1
    min_distance: int = 0

    def __post_init__(self) -> None:
        if self.init not in ("uniform", "marginal"):
            raise ValueError(f"unknown init mode {self.init!r}")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if self.block_size < 1 or self.min_distance < 0:
            raise ValueError("block_size must be >= 1 and min_distance >= 0")


@dataclass
class SamplerStats:
    events: int = 0
    zero_mass_fallbacks: int = 0
    block_shrinks: int = 0
    notes: list[str] = field(default_factory=list)


def pick_block(
    length: int,
    min_distance: int,
    block_size: int,
    frozen: Iterable[Cell],
    rng: np.random.Generator,
    n_voices: int = 4,
    rejection_budget: int = 1000,
) -> list[Cell]:
    """Cells for one block round: ticks pairwise at least min_distance apart.

    Tick sets are proposed uniformly and rejected on any violation, so every
    valid equal-size configuration is equally likely.  When the budget runs
    out the block shrinks to the largest feasible size (InfeasibleBlock only
    when not even a single cell is free).
    """
    frozen = set(frozen)
    voices_by_tick: dict[int, list[int]] = {}
    for tick in range(1, length + 1):
        free = [v for v in range(1, n_voices + 1) if (v, tick) not in frozen]
        if free:
            voices_by_tick[tick] = free
    ticks_available = sorted(voices_by_tick)
    if not ticks_available:
        raise InfeasibleBlock("every cell is frozen")

    for size in range(min(block_size, len(ticks_available)), 0, -1):
        for _ in range(rejection_budget):
            proposal = [ticks_available[i] for i in rng.integers(len(ticks_available), size=size)]
            if _respects_distance(proposal, min_distance):
                cells: list[Cell] = []
                for tick in proposal:
                    voices = voices_by_tick[tick]
                    voice = voices[int(rng.integers(len(voices)))]
                    if (voice, tick) not in cells:
                        cells.append((voice, tick))
                return cells
    raise InfeasibleBlock("rejection budget exhausted even for a single cell")


def _respects_distance(ticks: list[int], min_distance: int) -> bool:
    if min_distance == 0:
        return True
    ordered = sorted(ticks)
    return all(b - a >= min_distance for a, b in zip(ordered, ordered[1:]))


def run_grid(
    state: np.ndarray,
    conditional: Callable[[np.ndarray, int, int], np.ndarray],
    free_cells: list[Cell],
    allowed_for: Callable[[Cell], np.ndarray | None],
    config: SamplerConfig,
    rng: np.random.Generator,
    stats: SamplerStats,
) -> np.ndarray:
    """The chain itself, on an integer grid.  conditional(state, voice, tick)
    returns the distribution over the voice's token indices; allowed_for gives
    the cell's admissible indices (None for all).  Mutates and returns state."""
    if not free_cells:
        return state
    events_wanted = (
        config.max_iterations if config.max_iterations is not None else 100 * len(free_cells)
    )
    length = state.shape[1]
    frozen = {
        (v, t) for v in range(1, state.shape[0] + 1) for t in range(1, length + 1)
    } - set(free_cells)

    events = 0
    if config.block_size == 1:
        cells = list(free_cells)
        while events < events_wanted:
            voice, tick = cells[int(rng.integers(len(cells)))]
            _resample(state, state, conditional, (voice, tick), allowed_for, rng, stats)
            events += 1
    else:
        while events < events_wanted:
            try:
                block = pick_block(
                    length, config.min_distance, config.block_size, frozen, rng, state.shape[0]
                )
            except InfeasibleBlock:
                break
            if len(block) < config.block_size:
                stats.block_shrinks += 1
            block = block[: events_wanted - events]
            snapshot = state.copy()
            for cell in block:
                _resample(snapshot, state, conditional, cell, allowed_for, rng, stats)
            events += len(block)
    stats.events += events
    return state


def _resample(
    read_state: np.ndarray,
    write_state: np.ndarray,
    conditional: Callable[[np.ndarray, int, int], np.ndarray],
    cell: Cell,
    allowed_for: Callable[[Cell], np.ndarray | None],
    rng: np.random.Generator,
    stats: SamplerStats,
) -> None:
    voice, tick = cell
    probs = conditional(read_state, voice, tick)
    allowed = allowed_for(cell)
    write_state[voice - 1, tick - 1] = _draw(probs, allowed, rng, stats)


def _draw(
    probs: np.ndarray,
    allowed: np.ndarray | None,
    rng: np.random.Generator,
    stats: SamplerStats,
) -> int:
    if allowed is None:
        restricted = probs
        indices = None
    else:
        restricted = probs[allowed]
        indices = allowed
    mass = restricted.sum()
    if mass < 1e-300:
        stats.zero_mass_fallbacks += 1
        pick = int(rng.integers(len(restricted)))
    else:
        p = restricted / mass
        pick = int(np.searchsorted(np.cumsum(p), rng.random(), side="right"))
        pick = min(pick, len(restricted) - 1)
    return int(indices[pick]) if indices is not None else pick


class _MusicContext:
    """Precomputed index-level views of constraints, metadata and models."""

    def __init__(
        self,
        vocabularies: tuple[Vocabulary, ...],
        metadata: MetadataSeq,
        constraints: ConstraintSet,
        model_set: ConditionalModelSet | None,
    ) -> None:
        self.vocabularies = vocabularies
        self.length = len(metadata)
        self.metadata = metadata
        self.constraints = constraints
        self.fermata = np.array(metadata.fermata, dtype=bool)
        self.keys = np.array(metadata.key_signature, dtype=np.int64)
        self.model_set = model_set
        # Default samplable sets: pads never; no hold at tick 1.
        self._default = [v.samplable_indices for v in vocabularies]
        self._default_first = [
            np.array([i for i in v.samplable_indices if i != Vocabulary.HOLD_INDEX], dtype=np.int64)
            for v in vocabularies
        ]

    def allowed_for(self, cell: Cell) -> np.ndarray:
        voice, tick = cell
        vocab = self.vocabularies[voice - 1]
        base = self._default_first[voice - 1] if tick == 1 else self._default[voice - 1]
        tokens = self.constraints.allowed_at(cell)
        if tokens is None:
            return base
        indices = np.array(sorted(vocab.index_of(t) for t in tokens), dtype=np.int64)
        restricted = np.intersect1d(indices, base)
        # A constraint of {hold} at tick 1 (or of pads anywhere) has nothing
        # admissible left; honour the explicit set rather than silence it.
        return restricted if len(restricted) else indices

    def conditional(self, state: np.ndarray, voice: int, tick: int) -> np.ndarray:
        if self.model_set is None:
            raise ValueError("no models supplied")
        return self.model_set.cell_distribution(state, self.fermata, self.keys, voice, tick)

    def free_cells(self) -> list[Cell]:
        return [
            (voice, tick)
            for voice in range(1, 5)
            for tick in range(1, self.length + 1)
            if (voice, tick) not in self.constraints.frozen
        ]


def init_chorale(
    length: int,
    metadata: MetadataSeq,
    constraints: ConstraintSet,
    init: str,
    rng: np.random.Generator,
    vocabularies: tuple[Vocabulary, ...],
    marginals: tuple[np.ndarray, ...] | None = None,
    frozen_values: Chorale | None = None,
) -> Chorale:
    """Starting state: frozen cells copied from the caller, the rest drawn
    uniformly (or from per-voice corpus marginals) over each cell's allowed set."""
    if len(metadata) != length:
        raise ValueError(f"metadata length {len(metadata)} != {length}")
    if init == "marginal" and marginals is None:
        raise ValueError("marginal init needs per-voice marginal frequencies")
    context = _MusicContext(vocabularies, metadata, constraints, None)
    stats = SamplerStats()
    state = np.zeros((4, length), dtype=np.int64)

    for voice in range(1, 5):
        for tick in range(1, length + 1):
            cell = (voice, tick)
            if cell in constraints.frozen:
                if frozen_values is None:
                    raise MissingFrozenValue(f"cell {cell} is frozen but no seed chorale was given")
                token = frozen_values.token_at(voice, tick)
                allowed_tokens = constraints.allowed_at(cell)
                if allowed_tokens is not None and token not in allowed_tokens:
                    raise ValueError(f"frozen cell {cell} holds a token outside its allowed set")
                state[voice - 1, tick - 1] = vocabularies[voice - 1].index_of(token)
                continue
            allowed = context.allowed_for(cell)
            if init == "uniform":
                weights = np.ones(len(vocabularies[voice - 1]))
            else:
                weights = np.asarray(marginals[voice - 1], dtype=np.float64)
            state[voice - 1, tick - 1] = _draw(weights, allowed, rng, stats)
    return grid_to_chorale(state, vocabularies, metadata)


def step(
    chorale: Chorale,
    model_set: ConditionalModelSet,
    constraints: ConstraintSet,
    rng: np.random.Generator,
) -> tuple[Chorale, Cell]:
    """One update event: redraw a uniformly chosen non-frozen cell."""
    context = _MusicContext(model_set.vocabularies, chorale.metadata, constraints, model_set)
    free = context.free_cells()
    if not free:
        raise ValueError("every cell is frozen; nothing to resample")
    stats = SamplerStats()
    state = chorale_to_grid(chorale, model_set.vocabularies)
    cell = free[int(rng.integers(len(free)))]
    _resample(state, state, context.conditional, cell, context.allowed_for, rng, stats)
    return grid_to_chorale(state, model_set.vocabularies, chorale.metadata), cell


def run(
    model_set: ConditionalModelSet,
    metadata: MetadataSeq,
    constraints: ConstraintSet | None = None,
    config: SamplerConfig = SamplerConfig(),
    seed_chorale: Chorale | None = None,
) -> Chorale:
    chorale, _ = run_detailed(model_set, metadata, constraints, config, seed_chorale)
    return chorale


def run_detailed(
    model_set: ConditionalModelSet,
    metadata: MetadataSeq,
    constraints: ConstraintSet | None = None,
    config: SamplerConfig = SamplerConfig(),
    seed_chorale: Chorale | None = None,
) -> tuple[Chorale, SamplerStats]:
    """Initialize, run the budgeted update events, return the final score."""
    constraints = constraints or ConstraintSet.none()
    length = len(metadata)
    rng = np.random.default_rng(config.seed)
    stats = SamplerStats()

    start = init_chorale(
        length,
        metadata,
        constraints,
        config.init,
        rng,
        model_set.vocabularies,
        marginals=model_set.marginals,
        frozen_values=seed_chorale,
    )
    context = _MusicContext(model_set.vocabularies, metadata, constraints, model_set)
    state = chorale_to_grid(start, model_set.vocabularies)
    state = run_grid(
        state, context.conditional, context.free_cells(), context.allowed_for, config, rng, stats
    )
    return grid_to_chorale(state, model_set.vocabularies, metadata), stats
