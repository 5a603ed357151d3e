"""Model file format: a zip of numpy arrays plus a JSON header.

The header pins format version, model kind, encoding mode, window scope and a
vocabulary fingerprint; loading refuses anything whose fingerprint does not
match the embedded vocabularies, and applying a model to material in the
other encoding mode is rejected before any prediction happens.
"""

from __future__ import annotations

import io
import json
import zipfile

import numpy as np

from ..score import Vocabulary, parse_token_label, vocabulary_fingerprint
from .classifiers import MaxEntModel, MlpModel
from .training import ConditionalModelSet

FORMAT_VERSION = 1


class CorruptModel(ValueError):
    pass


class VersionMismatch(ValueError):
    pass


class EncodingModeMismatch(VersionMismatch):
    """Model and material use different note encodings (MIDI vs spelled)."""


def save_model_set(model_set: ConditionalModelSet) -> bytes:
    header = {
        "format_version": FORMAT_VERSION,
        "kind": model_set.kind,
        "encoding_mode": model_set.encoding_mode,
        "delta_t": model_set.delta_t,
        "vocab_hash": vocabulary_fingerprint(model_set.vocabularies),
    }
    vocab = {
        "mode": model_set.encoding_mode,
        "voices": [v.labels() for v in model_set.vocabularies],
    }
    arrays: dict[str, np.ndarray] = {}
    for voice_index, model in enumerate(model_set.models, start=1):
        for name, array in model.parameters().items():
            arrays[f"voice{voice_index}_{name}"] = array
        arrays[f"voice{voice_index}_marginal"] = model_set.marginals[voice_index - 1]

    buffer = io.BytesIO()
    np.savez_compressed(
        buffer,
        header=np.frombuffer(json.dumps(header).encode(), dtype=np.uint8),
        vocab=np.frombuffer(json.dumps(vocab).encode(), dtype=np.uint8),
        **arrays,
    )
    return buffer.getvalue()


def load_model_set(data: bytes) -> ConditionalModelSet:
    try:
        bundle = np.load(io.BytesIO(data), allow_pickle=False)
        header = json.loads(bytes(bundle["header"]))
        vocab_json = json.loads(bytes(bundle["vocab"]))
    except (zipfile.BadZipFile, OSError, KeyError, ValueError) as exc:
        raise CorruptModel(f"unreadable model file: {exc}") from exc

    version = header.get("format_version")
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"model format version {version!r}, expected {FORMAT_VERSION}")
    kind = header.get("kind")
    mode = header.get("encoding_mode")
    delta_t = header.get("delta_t")
    if kind not in ("maxent", "mlp") or mode not in ("midi", "spelled") or not isinstance(delta_t, int):
        raise CorruptModel(f"bad header fields: {header!r}")

    try:
        vocabularies = tuple(
            Vocabulary(
                voice_index,
                [parse_token_label(label, mode) for label in labels[Vocabulary.RESERVED :]],
                mode,
            )
            for voice_index, labels in enumerate(vocab_json["voices"], start=1)
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"bad vocabulary block: {exc}") from exc
    if vocabulary_fingerprint(vocabularies) != header.get("vocab_hash"):
        raise CorruptModel("vocabulary fingerprint mismatch")

    try:
        models = []
        marginals = []
        for voice_index in range(1, 5):
            if kind == "maxent":
                model: MaxEntModel | MlpModel = MaxEntModel(
                    bundle[f"voice{voice_index}_w"], bundle[f"voice{voice_index}_b"]
                )
            else:
                model = MlpModel(
                    bundle[f"voice{voice_index}_w1"],
                    bundle[f"voice{voice_index}_b1"],
                    bundle[f"voice{voice_index}_w2"],
                    bundle[f"voice{voice_index}_b2"],
                )
            if model.n_classes != len(vocabularies[voice_index - 1]):
                raise CorruptModel(f"voice {voice_index} weights do not match its vocabulary")
            models.append(model)
            marginals.append(bundle[f"voice{voice_index}_marginal"])
    except KeyError as exc:
        raise CorruptModel(f"missing array: {exc}") from exc

    return ConditionalModelSet(kind, vocabularies, delta_t, tuple(models), tuple(marginals))


def require_mode(model_set: ConditionalModelSet, mode: str) -> None:
    if model_set.encoding_mode != mode:
        raise EncodingModeMismatch(
            f"model was trained in {model_set.encoding_mode} mode, material is {mode}"
        )
