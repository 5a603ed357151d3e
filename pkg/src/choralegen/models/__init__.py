"""Per-voice conditional note distributions: feature encoding, classifiers
trained from scratch, gradient checking and model-file serialization."""

from .classifiers import DimensionMismatch, MaxEntModel, MlpModel, relu, softmax
from .features import WindowCodec, dense_from_hot
from .gradcheck import gradient_check, random_instance
from .serialize import (
    CorruptModel,
    EncodingModeMismatch,
    VersionMismatch,
    load_model_set,
    require_mode,
    save_model_set,
)
from .training import (
    ConditionalModelSet,
    ConditionalModelTrainer,
    EmptyCorpus,
    TrainConfig,
    TrainReport,
    train,
)

__all__ = [
    "ConditionalModelSet",
    "ConditionalModelTrainer",
    "CorruptModel",
    "DimensionMismatch",
    "EmptyCorpus",
    "EncodingModeMismatch",
    "MaxEntModel",
    "MlpModel",
    "TrainConfig",
    "TrainReport",
    "VersionMismatch",
    "WindowCodec",
    "dense_from_hot",
    "gradient_check",
    "load_model_set",
    "random_instance",
    "relu",
    "require_mode",
    "save_model_set",
    "softmax",
    "train",
]
