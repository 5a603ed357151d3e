"""Softmax-output classifiers trained from scratch with numpy.

Two kinds realize the conditional distributions: a no-hidden-layer softmax
regression and a one-hidden-layer ReLU perceptron.  Both expose the same
surface: predict_proba on dense feature vectors, a fast path on hot (sparse)
encodings for the sampler, and loss_and_grads for the trainer and the
finite-difference gradient check.
"""

from __future__ import annotations

import numpy as np


class DimensionMismatch(ValueError):
    pass


def softmax(z: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max subtraction for stability."""
    z = np.asarray(z, dtype=np.float64)
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


class MaxEntModel:
    """p(class | x) = softmax(W x + b); W is (n_classes, n_features)."""

    kind = "maxent"

    def __init__(self, w: np.ndarray, b: np.ndarray) -> None:
        self.w = np.asarray(w, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        if self.w.ndim != 2 or self.b.shape != (self.w.shape[0],):
            raise DimensionMismatch("weight matrix must be (n_classes, n_features) with matching bias")

    @classmethod
    def zero_init(cls, n_classes: int, n_features: int) -> MaxEntModel:
        return cls(np.zeros((n_classes, n_features)), np.zeros(n_classes))

    @property
    def n_classes(self) -> int:
        return self.w.shape[0]

    @property
    def n_features(self) -> int:
        return self.w.shape[1]

    def parameters(self) -> dict[str, np.ndarray]:
        return {"w": self.w, "b": self.b}

    def logits(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.n_features:
            raise DimensionMismatch(f"expected {self.n_features} features, got {x.shape[-1]}")
        return x @ self.w.T + self.b

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return softmax(self.logits(x))

    def logits_hot(self, ones: np.ndarray, fermata: np.ndarray, fermata_positions: np.ndarray) -> np.ndarray:
        return self.w[:, ones].sum(axis=1) + self.w[:, fermata_positions] @ fermata + self.b

    def loss_and_grads(self, x: np.ndarray, y: np.ndarray) -> tuple[float, dict[str, np.ndarray]]:
        """Mean negative log-likelihood of targets y and its parameter gradients."""
        probs = self.predict_proba(x)
        n = x.shape[0]
        nll = -np.log(probs[np.arange(n), y]).mean()
        dz = probs
        dz[np.arange(n), y] -= 1.0
        dz /= n
        return nll, {"w": dz.T @ x, "b": dz.sum(axis=0)}


class MlpModel:
    """One ReLU hidden layer: softmax(W2 relu(W1 x + b1) + b2)."""

    kind = "mlp"

    def __init__(self, w1: np.ndarray, b1: np.ndarray, w2: np.ndarray, b2: np.ndarray) -> None:
        self.w1 = np.asarray(w1, dtype=np.float64)
        self.b1 = np.asarray(b1, dtype=np.float64)
        self.w2 = np.asarray(w2, dtype=np.float64)
        self.b2 = np.asarray(b2, dtype=np.float64)
        if (
            self.w1.ndim != 2
            or self.b1.shape != (self.w1.shape[0],)
            or self.w2.shape[1] != self.w1.shape[0]
            or self.b2.shape != (self.w2.shape[0],)
        ):
            raise DimensionMismatch("inconsistent layer shapes")

    @classmethod
    def he_init(cls, n_classes: int, n_features: int, hidden: int, rng: np.random.Generator) -> MlpModel:
        w1 = rng.standard_normal((hidden, n_features)) * np.sqrt(2.0 / n_features)
        w2 = rng.standard_normal((n_classes, hidden)) * np.sqrt(2.0 / hidden)
        return cls(w1, np.zeros(hidden), w2, np.zeros(n_classes))

    @property
    def n_classes(self) -> int:
        return self.w2.shape[0]

    @property
    def n_features(self) -> int:
        return self.w1.shape[1]

    @property
    def hidden_size(self) -> int:
        return self.w1.shape[0]

    def parameters(self) -> dict[str, np.ndarray]:
        return {"w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": self.b2}

    def logits(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.n_features:
            raise DimensionMismatch(f"expected {self.n_features} features, got {x.shape[-1]}")
        return relu(x @ self.w1.T + self.b1) @ self.w2.T + self.b2

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return softmax(self.logits(x))

    def logits_hot(self, ones: np.ndarray, fermata: np.ndarray, fermata_positions: np.ndarray) -> np.ndarray:
        pre = self.w1[:, ones].sum(axis=1) + self.w1[:, fermata_positions] @ fermata + self.b1
        return self.w2 @ relu(pre) + self.b2

    def loss_and_grads(self, x: np.ndarray, y: np.ndarray) -> tuple[float, dict[str, np.ndarray]]:
        x = np.asarray(x, dtype=np.float64)
        n = x.shape[0]
        pre = x @ self.w1.T + self.b1
        hidden = relu(pre)
        probs = softmax(hidden @ self.w2.T + self.b2)
        nll = -np.log(probs[np.arange(n), y]).mean()
        dz = probs
        dz[np.arange(n), y] -= 1.0
        dz /= n
        dhidden = dz @ self.w2
        dpre = dhidden * (pre > 0)
        return nll, {
            "w1": dpre.T @ x,
            "b1": dpre.sum(axis=0),
            "w2": dz.T @ hidden,
            "b2": dz.sum(axis=0),
        }
