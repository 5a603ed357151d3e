"""Maximum-likelihood training of the four per-voice conditional classifiers.

One classifier per voice (parameters shared across time) is fit by mini-batch
stochastic gradient descent with momentum on the negative log-likelihood of
each cell's token given its context window.  Everything is deterministic for
a fixed seed.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from ..ingest.corpus import Corpus, EmptyCorpus
from ..score import Chorale, Vocabulary, build_vocabularies
from .classifiers import DimensionMismatch, MaxEntModel, MlpModel, softmax
from .features import CellBatch, WindowCodec, dense_from_hot

MODEL_KINDS = ("maxent", "mlp")


@dataclass(frozen=True)
class TrainConfig:
    kind: str = "maxent"
    delta_t: int = 16
    epochs: int = 20
    learning_rate: float = 0.1
    batch_size: int = 32
    momentum: float = 0.9
    hidden_size: int = 500
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"kind must be one of {MODEL_KINDS}, got {self.kind!r}")


@dataclass
class VoiceMetrics:
    train_cross_entropy: float
    train_accuracy: float
    val_cross_entropy: float
    val_accuracy: float


@dataclass
class TrainReport:
    config: dict[str, Any]
    vocab_sizes: list[int]
    epochs: list[list[VoiceMetrics]] = field(default_factory=list)
    final_objective: list[float] = field(default_factory=list)  # total train log-likelihood per voice

    def to_dict(self) -> dict[str, Any]:
        return {
            "config": dict(self.config),
            "vocab_sizes": list(self.vocab_sizes),
            "epochs": [[asdict(m) for m in epoch] for epoch in self.epochs],
            "final_objective": list(self.final_objective),
        }

    def last_val_cross_entropy(self, voice_index: int) -> float:
        return self.epochs[-1][voice_index - 1].val_cross_entropy

    def best_val_cross_entropy(self, voice_index: int) -> float:
        return min(epoch[voice_index - 1].val_cross_entropy for epoch in self.epochs)


class ConditionalModelSet:
    """The four trained per-voice models plus everything needed to apply them."""

    def __init__(
        self,
        kind: str,
        vocabularies: tuple[Vocabulary, ...],
        delta_t: int,
        models: tuple[MaxEntModel | MlpModel, ...],
        marginals: tuple[np.ndarray, ...],
    ) -> None:
        self.kind = kind
        self.vocabularies = tuple(vocabularies)
        self.delta_t = delta_t
        self.models = tuple(models)
        self.marginals = tuple(np.asarray(m, dtype=np.float64) for m in marginals)
        self.codec = WindowCodec(self.vocabularies, delta_t)

    @property
    def encoding_mode(self) -> str:
        return self.vocabularies[0].mode

    def model(self, voice_index: int) -> MaxEntModel | MlpModel:
        return self.models[voice_index - 1]

    def predict_proba(self, voice_index: int, x: np.ndarray) -> np.ndarray:
        """Distribution over voice voice_index's vocabulary for a dense feature vector."""
        x = np.asarray(x, dtype=np.float64)
        expected = self.codec.feature_length(voice_index)
        if x.shape[-1] != expected:
            raise DimensionMismatch(f"voice {voice_index} expects {expected} features, got {x.shape[-1]}")
        return self.models[voice_index - 1].predict_proba(x)

    def cell_distribution(
        self,
        grid: np.ndarray,
        fermata: np.ndarray,
        keys: np.ndarray,
        voice_index: int,
        tick: int,
    ) -> np.ndarray:
        """Fast conditional for the sampler, straight from hot encodings."""
        ones, ferm = self.codec.hot_cell(grid, fermata, keys, voice_index, tick)
        logits = self.models[voice_index - 1].logits_hot(
            ones, ferm, self.codec.fermata_positions(voice_index)
        )
        return softmax(logits)


def train(corpus: Corpus, config: TrainConfig) -> tuple[ConditionalModelSet, TrainReport]:
    """Fit all four voices on the corpus train split; metrics come from the
    validation split (train metrics are reported when it is empty)."""
    train_chorales = [r.chorale for r in corpus.split_records("train")]
    val_chorales = [r.chorale for r in corpus.split_records("validation")]
    if not train_chorales:
        raise EmptyCorpus("corpus has no train split")
    vocabularies = build_vocabularies(train_chorales + val_chorales)
    codec = WindowCodec(vocabularies, config.delta_t)

    report = TrainReport(config=asdict(config), vocab_sizes=[len(v) for v in vocabularies])
    models: list[MaxEntModel | MlpModel] = []
    marginals: list[np.ndarray] = []
    per_voice_metrics: list[list[VoiceMetrics]] = []

    for voice_index in range(1, 5):
        model, voice_metrics, marginal, final_log_likelihood = _train_voice(
            voice_index, train_chorales, val_chorales, codec, config
        )
        models.append(model)
        marginals.append(marginal)
        per_voice_metrics.append(voice_metrics)
        report.final_objective.append(final_log_likelihood)

    report.epochs = [
        [per_voice_metrics[v][epoch] for v in range(4)] for epoch in range(config.epochs)
    ]
    return ConditionalModelSet(config.kind, vocabularies, config.delta_t, tuple(models), tuple(marginals)), report


def _train_voice(
    voice_index: int,
    train_chorales: list[Chorale],
    val_chorales: list[Chorale],
    codec: WindowCodec,
    config: TrainConfig,
) -> tuple[MaxEntModel | MlpModel, list[VoiceMetrics], np.ndarray, float]:
    rng = np.random.default_rng([config.seed, voice_index])
    n_classes = len(codec.vocabularies[voice_index - 1])
    n_features = codec.feature_length(voice_index)
    if config.kind == "maxent":
        model: MaxEntModel | MlpModel = MaxEntModel.zero_init(n_classes, n_features)
    else:
        model = MlpModel.he_init(n_classes, n_features, config.hidden_size, rng)

    train_batch = _stack_batches([codec.encode_cells(c, voice_index) for c in train_chorales])
    val_batch = (
        _stack_batches([codec.encode_cells(c, voice_index) for c in val_chorales])
        if val_chorales
        else None
    )
    marginal = np.bincount(train_batch.targets, minlength=n_classes).astype(np.float64)
    marginal /= marginal.sum()

    ferm_positions = codec.fermata_positions(voice_index)
    velocity = {name: np.zeros_like(array) for name, array in model.parameters().items()}
    n = len(train_batch.targets)
    metrics: list[VoiceMetrics] = []

    for _ in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            rows = order[start : start + config.batch_size]
            x = dense_from_hot(
                train_batch.ones[rows], train_batch.fermata[rows], n_features, ferm_positions
            )
            _, grads = model.loss_and_grads(x, train_batch.targets[rows])
            params = model.parameters()
            for name, grad in grads.items():
                velocity[name] *= config.momentum
                velocity[name] -= config.learning_rate * grad
                params[name] += velocity[name]

        train_ce, train_acc = _evaluate(model, train_batch, codec, voice_index)
        if val_batch is not None:
            val_ce, val_acc = _evaluate(model, val_batch, codec, voice_index)
        else:
            val_ce, val_acc = train_ce, train_acc
        metrics.append(VoiceMetrics(train_ce, train_acc, val_ce, val_acc))

    if metrics:
        final_train_ce = metrics[-1].train_cross_entropy
    else:
        final_train_ce = _evaluate(model, train_batch, codec, voice_index)[0]
    final_log_likelihood = -final_train_ce * n
    return model, metrics, marginal, final_log_likelihood


def _stack_batches(batches: list[CellBatch]) -> CellBatch:
    return CellBatch(
        ones=np.concatenate([b.ones for b in batches]),
        fermata=np.concatenate([b.fermata for b in batches]),
        targets=np.concatenate([b.targets for b in batches]),
    )


def _evaluate(
    model: MaxEntModel | MlpModel,
    batch: CellBatch,
    codec: WindowCodec,
    voice_index: int,
    chunk: int = 1024,
) -> tuple[float, float]:
    """(mean cross-entropy in nats, accuracy) over a cell batch."""
    n_features = codec.feature_length(voice_index)
    ferm_positions = codec.fermata_positions(voice_index)
    n = len(batch.targets)
    nll_total = 0.0
    correct = 0
    for start in range(0, n, chunk):
        rows = slice(start, min(start + chunk, n))
        x = dense_from_hot(batch.ones[rows], batch.fermata[rows], n_features, ferm_positions)
        probs = model.predict_proba(x)
        targets = batch.targets[rows]
        picked = probs[np.arange(len(targets)), targets]
        nll_total += -np.log(np.maximum(picked, 1e-300)).sum()
        correct += int((probs.argmax(axis=1) == targets).sum())
    return nll_total / n, correct / n


class ConditionalModelTrainer:
    """Estimator-style front end: construct with hyperparameters, fit on a corpus.

    After fit, model_set_ holds the four trained models and report_ the
    per-epoch metrics; get_params/set_params follow the usual estimator
    conventions so the trainer composes with parameter sweeps.
    """

    def __init__(
        self,
        kind: str = "maxent",
        delta_t: int = 16,
        epochs: int = 20,
        learning_rate: float = 0.1,
        batch_size: int = 32,
        momentum: float = 0.9,
        hidden_size: int = 500,
        seed: int = 0,
    ) -> None:
        self.kind = kind
        self.delta_t = delta_t
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.momentum = momentum
        self.hidden_size = hidden_size
        self.seed = seed

    _param_names = (
        "kind",
        "delta_t",
        "epochs",
        "learning_rate",
        "batch_size",
        "momentum",
        "hidden_size",
        "seed",
    )

    def get_params(self, deep: bool = True) -> dict[str, Any]:
        return {name: getattr(self, name) for name in self._param_names}

    def set_params(self, **params: Any) -> ConditionalModelTrainer:
        for name, value in params.items():
            if name not in self._param_names:
                raise ValueError(f"unknown parameter {name!r}")
            setattr(self, name, value)
        return self

    def fit(self, corpus: Corpus) -> ConditionalModelTrainer:
        config = TrainConfig(**self.get_params())
        self.model_set_, self.report_ = train(corpus, config)
        return self

    def predict_proba(self, voice_index: int, x: np.ndarray) -> np.ndarray:
        if not hasattr(self, "model_set_"):
            raise RuntimeError("trainer is not fitted; call fit first")
        return self.model_set_.predict_proba(voice_index, x)
