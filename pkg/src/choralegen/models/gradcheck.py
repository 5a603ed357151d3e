"""Finite-difference verification of the hand-rolled gradients.

Central differences with step 1e-5 in double precision, compared against the
analytic gradients on a random subset of parameters.  The error is relative
to the gradient scale with a floor of 1 (the loss scale), which keeps
finite-difference noise on near-zero components from drowning the signal.
"""

from __future__ import annotations

import numpy as np

from .classifiers import MaxEntModel, MlpModel

STEP = 1e-5


def gradient_check(
    model: MaxEntModel | MlpModel,
    x: np.ndarray,
    target: int,
    rng: np.random.Generator,
    samples_per_array: int = 8,
    step: float = STEP,
) -> float:
    """Max relative error between analytic and central-difference gradients."""
    x2 = np.asarray(x, dtype=np.float64)[None, :]
    y = np.array([target])
    _, grads = model.loss_and_grads(x2.copy(), y)
    worst = 0.0
    for name, array in model.parameters().items():
        flat = array.reshape(-1)
        count = min(samples_per_array, flat.size)
        picks = rng.choice(flat.size, size=count, replace=False)
        grad_flat = grads[name].reshape(-1)
        for index in picks:
            original = flat[index]
            flat[index] = original + step
            up, _ = model.loss_and_grads(x2.copy(), y)
            flat[index] = original - step
            down, _ = model.loss_and_grads(x2.copy(), y)
            flat[index] = original
            numeric = (up - down) / (2.0 * step)
            analytic = grad_flat[index]
            error = abs(numeric - analytic) / max(1.0, abs(numeric), abs(analytic))
            worst = max(worst, error)
    return worst


def random_instance(
    kind: str,
    n_classes: int,
    n_features: int,
    hidden: int,
    seed: int,
) -> tuple[MaxEntModel | MlpModel, np.ndarray, int]:
    """A random (model, input, target) triple for checking gradients.

    MLP inputs are redrawn until every hidden pre-activation sits clear of the
    ReLU kink, where a two-sided difference would straddle the
    non-differentiability and measure nothing useful.
    """
    rng = np.random.default_rng(seed)
    if kind == "maxent":
        model: MaxEntModel | MlpModel = MaxEntModel(
            rng.standard_normal((n_classes, n_features)) * 0.3,
            rng.standard_normal(n_classes) * 0.3,
        )
        x = _sparse_input(rng, n_features)
    elif kind == "mlp":
        model = MlpModel.he_init(n_classes, n_features, hidden, rng)
        for _ in range(100):
            x = _sparse_input(rng, n_features)
            pre = x @ model.w1.T + model.b1
            if np.abs(pre).min() > 1e-3:
                break
        else:
            raise RuntimeError("could not find an input clear of every ReLU kink")
    else:
        raise ValueError(f"unknown model kind {kind!r}")
    target = int(rng.integers(n_classes))
    return model, x, target


def _sparse_input(rng: np.random.Generator, n_features: int) -> np.ndarray:
    values = rng.random(n_features)
    mask = rng.random(n_features) < 0.4
    return values * mask
