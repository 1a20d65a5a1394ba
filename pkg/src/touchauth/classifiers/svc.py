"""Kernel support-vector classifier trained by sequential minimal optimization.

The dual

    min 1/2 a'Qa - e'a   s.t.  0 <= a <= C,  y'a = 0,   Q_ij = y_i y_j K(x_i, x_j)

is solved two coordinates at a time. The working pair is the maximal
violating ``i`` plus the ``j`` giving the largest second-order decrease,
and iteration stops once the KKT violation gap drops below ``tol``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .config import SVCConfig

logger = logging.getLogger(__name__)

TAU = 1e-12


def kernel_matrix(A, B, kernel: str, gamma: float) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if kernel == "linear":
        return A @ B.T
    sq = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :] - 2.0 * (A @ B.T)
    return np.exp(-gamma * np.maximum(sq, 0.0))


def default_gamma(X) -> float:
    var = float(np.asarray(X, dtype=float).var())
    return 1.0 / (X.shape[1] * var) if var > 0 else 1.0


@dataclass(frozen=True)
class SVCParams:
    support_vectors: np.ndarray
    alphas: np.ndarray
    sv_labels: np.ndarray  # +1 / -1
    bias: float
    kernel: str
    gamma: float
    C: float
    converged: bool
    iterations: int

    def __post_init__(self):
        for name in ("support_vectors", "alphas", "sv_labels"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def to_dict(self) -> dict:
        return {
            "support_vectors": self.support_vectors.tolist(),
            "alphas": self.alphas.tolist(),
            "sv_labels": self.sv_labels.tolist(),
            "bias": self.bias,
            "kernel": self.kernel,
            "gamma": self.gamma,
            "C": self.C,
            "converged": self.converged,
            "iterations": self.iterations,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SVCParams":
        sv = np.array(data["support_vectors"], dtype=float)
        return cls(
            sv.reshape(len(data["alphas"]), -1) if sv.size else sv.reshape(0, 0),
            data["alphas"],
            data["sv_labels"],
            float(data["bias"]),
            data["kernel"],
            float(data["gamma"]),
            float(data["C"]),
            bool(data["converged"]),
            int(data["iterations"]),
        )


@dataclass
class DualSolution:
    alpha: np.ndarray
    bias: float
    converged: bool
    iterations: int


def solve_dual(K: np.ndarray, y: np.ndarray, C: float, tol: float, max_iter: int) -> DualSolution:
    n = y.shape[0]
    alpha = np.zeros(n)
    grad = -np.ones(n)
    diag = np.diag(K).copy()
    converged = False
    it = 0
    while it < max_iter:
        up = ((alpha < C) & (y > 0)) | ((alpha > 0) & (y < 0))
        low = ((alpha < C) & (y < 0)) | ((alpha > 0) & (y > 0))
        score = -y * grad
        if not up.any() or not low.any():
            converged = True
            break
        i = int(np.flatnonzero(up)[np.argmax(score[up])])
        m = score[i]
        if m - score[low].min() < tol:
            converged = True
            break

        b = m - score
        cand = low & (b > 0)
        a = diag[i] + diag - 2.0 * K[i]
        a = np.where(a > 0, a, TAU)
        obj = np.where(cand, -(b * b) / a, np.inf)
        j = int(np.argmin(obj))

        s = b[j] / a[j]
        s = min(s, C - alpha[i] if y[i] > 0 else alpha[i])
        s = min(s, alpha[j] if y[j] > 0 else C - alpha[j])
        alpha[i] += y[i] * s
        alpha[j] -= y[j] * s
        # snap round-off back into the box
        for k in (i, j):
            if alpha[k] < 1e-12 * C:
                alpha[k] = 0.0
            elif alpha[k] > C * (1 - 1e-12):
                alpha[k] = C
        grad += s * y * (K[i] - K[j])
        it += 1

    return DualSolution(alpha, -_rho(alpha, grad, y, C), converged, it)


def _rho(alpha, grad, y, C) -> float:
    yg = y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        return float(yg[free].mean())
    at_upper = alpha >= C
    at_lower = alpha <= 0
    ub_mask = (at_upper & (y < 0)) | (at_lower & (y > 0))
    lb_mask = (at_upper & (y > 0)) | (at_lower & (y < 0))
    ub = yg[ub_mask].min() if ub_mask.any() else np.inf
    lb = yg[lb_mask].max() if lb_mask.any() else -np.inf
    if np.isfinite(ub) and np.isfinite(lb):
        return float((ub + lb) / 2)
    return float(ub if np.isfinite(ub) else lb)


def train(X, labels01, config: SVCConfig) -> SVCParams:
    """Fit on rows ``X`` with labels in {0, 1}; label 1 maps to +1."""
    X = np.asarray(X, dtype=float)
    y = np.where(np.asarray(labels01) == 1, 1.0, -1.0)
    gamma = config.gamma if config.gamma is not None else default_gamma(X)
    K = kernel_matrix(X, X, config.kernel, gamma)
    sol = solve_dual(K, y, config.C, config.tol, config.max_iter)
    if not sol.converged:
        logger.warning("SVC stopped at max_iter=%d before reaching tol=%g", config.max_iter, config.tol)
    sv = sol.alpha > 0
    return SVCParams(X[sv], sol.alpha[sv], y[sv], sol.bias, config.kernel, gamma, config.C, sol.converged, sol.iterations)


def decision_function(params: SVCParams, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if params.alphas.size == 0:
        return np.full(X.shape[0], params.bias)
    K = kernel_matrix(X, params.support_vectors, params.kernel, params.gamma)
    return K @ (params.alphas * params.sv_labels) + params.bias
