"""Feed-forward network: ReLU hidden layers, logistic output, Adam updates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import TrainingError
from .config import MLPConfig


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def softplus(z):
    return np.logaddexp(0.0, z)


@dataclass(frozen=True)
class MLPParams:
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    loss_history: tuple[float, ...] = ()

    def __post_init__(self):
        for arr in self.weights + self.biases:
            arr.setflags(write=False)

    def to_dict(self) -> dict:
        return {
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "loss_history": list(self.loss_history),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MLPParams":
        weights = tuple(np.array(w, dtype=float).reshape(len(w), -1) for w in data["weights"])
        biases = tuple(np.array(b, dtype=float) for b in data["biases"])
        return cls(weights, biases, tuple(data.get("loss_history", ())))


def layer_sizes(n_inputs: int, hidden) -> list[int]:
    return [n_inputs, *hidden, 1]


def init_params(sizes, rng: np.random.Generator) -> list[np.ndarray]:
    """Glorot-uniform weights, zero biases; returned flat as [W0, b0, W1, b1, ...]."""
    params = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        params.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        params.append(np.zeros(fan_out))
    return params


def forward(params, X):
    """Return output logits and the per-layer activations needed for backprop."""
    activations = [X]
    pre = []
    h = X
    n_layers = len(params) // 2
    for k in range(n_layers):
        z = h @ params[2 * k] + params[2 * k + 1]
        pre.append(z)
        h = np.maximum(z, 0.0) if k < n_layers - 1 else z
        activations.append(h)
    return h[:, 0], (activations, pre)


def loss_and_grads(params, X, y):
    """Mean binary cross-entropy on logits and its gradient for every array."""
    logits, (acts, pre) = forward(params, X)
    n = X.shape[0]
    loss = float(np.mean(softplus(logits) - y * logits))
    delta = ((sigmoid(logits) - y) / n)[:, None]
    grads = [None] * len(params)
    for k in range(len(params) // 2 - 1, -1, -1):
        grads[2 * k] = acts[k].T @ delta
        grads[2 * k + 1] = delta.sum(axis=0)
        if k > 0:
            delta = (delta @ params[2 * k].T) * (pre[k - 1] > 0)
    return loss, grads


def predict_logits(params: MLPParams, X) -> np.ndarray:
    flat = [a for pair in zip(params.weights, params.biases) for a in pair]
    logits, _ = forward(flat, np.asarray(X, dtype=float))
    return logits


def train(X, y, config: MLPConfig, seed: int) -> MLPParams:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    rng = np.random.default_rng(seed)
    params = init_params(layer_sizes(X.shape[1], config.hidden), rng)
    m = [np.zeros_like(p) for p in params]
    v = [np.zeros_like(p) for p in params]
    b1, b2 = config.beta1, config.beta2
    step = 0
    history = []
    n = X.shape[0]
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, config.batch_size):
            batch = order[start:start + config.batch_size]
            loss, grads = loss_and_grads(params, X[batch], y[batch])
            if not np.isfinite(loss):
                raise TrainingError(f"MLP loss became non-finite in epoch {epoch}")
            total += loss * batch.size
            step += 1
            for p, g, mk, vk in zip(params, grads, m, v):
                mk *= b1
                mk += (1 - b1) * g
                vk *= b2
                vk += (1 - b2) * g * g
                m_hat = mk / (1 - b1 ** step)
                v_hat = vk / (1 - b2 ** step)
                p -= config.learning_rate * m_hat / (np.sqrt(v_hat) + config.eps)
        history.append(total / n)
    return MLPParams(tuple(params[0::2]), tuple(params[1::2]), tuple(history))


def zero_params(n_inputs: int, hidden) -> MLPParams:
    sizes = layer_sizes(n_inputs, hidden)
    return MLPParams(
        tuple(np.zeros((a, b)) for a, b in zip(sizes[:-1], sizes[1:])),
        tuple(np.zeros(b) for b in sizes[1:]),
    )
