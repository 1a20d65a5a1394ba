"""Common interface over the three classifier families.

Every model standardizes its inputs with statistics from the training
rows and emits a score in [0, 1]; higher means "imposter" (label 1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigError, ContractError, TrainingError
from . import gbt, mlp, svc
from .config import GBTConfig, MLPConfig, SVCConfig, TrainConfig, VARIANTS, check_variant, config_from_dict, config_to_dict
from .standardize import Standardizer, apply_standardizer, fit_standardizer

FORMAT_VERSION = 1

_PARAM_TYPES = {"mlp": mlp.MLPParams, "gbt": gbt.GBTParams, "svc": svc.SVCParams}

__all__ = [
    "GBTConfig", "MLPConfig", "SVCConfig", "TrainConfig", "VARIANTS",
    "Standardizer", "fit_standardizer", "apply_standardizer",
    "TrainedModel", "fit", "train_mlp", "train_gbt", "train_svc", "train_model",
    "predict_score", "predict_scores", "classify", "classify_scores",
    "save_model", "load_model", "model_to_json", "model_from_json",
]


@dataclass(frozen=True)
class TrainedModel:
    variant: str
    standardizer: Standardizer
    params: object
    config: object
    seed: int
    metadata: dict = field(default_factory=dict)

    @property
    def n_features(self) -> int:
        return int(self.standardizer.mean.shape[0])


def _xy(data):
    if isinstance(data, tuple):
        X, y = data
    else:
        X, y = data.X, data.y
    return np.asarray(X, dtype=float), np.asarray(y)


def fit(variant: str, X, y, config=None, seed: int = 0) -> TrainedModel:
    variant = check_variant(variant)
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] != y.shape[0] or X.shape[0] == 0:
        raise ContractError("training data must be a non-empty (n, d) matrix with n labels")
    if not np.all(np.isin(y, (0, 1))):
        raise ContractError("labels must be 0 or 1")
    if np.unique(y).size < 2:
        raise TrainingError("training data contains a single class")
    if config is None:
        config = TrainConfig().for_variant(variant)
    standardizer = fit_standardizer(X)
    Z = apply_standardizer(standardizer, X)
    metadata = {}
    if variant == "mlp":
        params = mlp.train(Z, y, config, seed)
    elif variant == "gbt":
        params = gbt.train(Z, y, config)
    else:
        params = svc.train(Z, y, config)
        metadata = {"converged": params.converged, "iterations": params.iterations}
    return TrainedModel(variant, standardizer, params, config, int(seed), metadata)


def train_mlp(train, config: MLPConfig | None = None, seed: int = 0) -> TrainedModel:
    return fit("mlp", *_xy(train), config or MLPConfig(), seed)


def train_gbt(train, config: GBTConfig | None = None, seed: int = 0) -> TrainedModel:
    return fit("gbt", *_xy(train), config or GBTConfig(), seed)


def train_svc(train, config: SVCConfig | None = None, seed: int = 0) -> TrainedModel:
    return fit("svc", *_xy(train), config or SVCConfig(), seed)


def train_model(variant: str, train, config: TrainConfig | None = None, seed: int = 0) -> TrainedModel:
    config = config or TrainConfig()
    return fit(variant, *_xy(train), config.for_variant(variant), seed)


def predict_scores(model: TrainedModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ContractError(f"expected vectors of {model.n_features} values, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ContractError("input vectors must be finite")
    Z = apply_standardizer(model.standardizer, X)
    if model.variant == "mlp":
        margin = mlp.predict_logits(model.params, Z)
    elif model.variant == "gbt":
        margin = gbt.predict_margin(model.params, Z)
    else:
        margin = svc.decision_function(model.params, Z)
    return mlp.sigmoid(margin)


def predict_score(model: TrainedModel, vector) -> float:
    values = getattr(vector, "values", vector)
    values = np.asarray(values, dtype=float)
    if values.ndim != 1:
        raise ContractError("predict_score takes a single vector")
    return float(predict_scores(model, values)[0])


def _check_threshold(threshold: float) -> None:
    if not 0.0 < threshold < 1.0:
        raise ConfigError(f"threshold must be in (0, 1), got {threshold}")


def classify_scores(scores, threshold: float = 0.5) -> np.ndarray:
    _check_threshold(threshold)
    return (np.asarray(scores) >= threshold).astype(int)


def classify(model: TrainedModel, vector, threshold: float = 0.5) -> int:
    """1 (imposter) when the score reaches the threshold, else 0."""
    _check_threshold(threshold)
    return int(predict_score(model, vector) >= threshold)


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "format": "touchauth-model",
        "version": FORMAT_VERSION,
        "variant": model.variant,
        "seed": model.seed,
        "config": config_to_dict(model.config),
        "standardizer": model.standardizer.to_dict(),
        "params": model.params.to_dict(),
        "metadata": model.metadata,
    }


def model_from_dict(data: dict) -> TrainedModel:
    if data.get("format") != "touchauth-model":
        raise ConfigError("not a touchauth model document")
    if data.get("version") != FORMAT_VERSION:
        raise ConfigError(f"unsupported model format version {data.get('version')}")
    variant = check_variant(data["variant"])
    return TrainedModel(
        variant,
        Standardizer.from_dict(data["standardizer"]),
        _PARAM_TYPES[variant].from_dict(data["params"]),
        config_from_dict(variant, data["config"]),
        int(data["seed"]),
        dict(data.get("metadata", {})),
    )


def model_to_json(model: TrainedModel) -> str:
    return json.dumps(model_to_dict(model), sort_keys=True)


def model_from_json(text: str) -> TrainedModel:
    return model_from_dict(json.loads(text))


def save_model(model: TrainedModel, path: str | Path) -> None:
    Path(path).write_text(model_to_json(model) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> TrainedModel:
    return model_from_json(Path(path).read_text(encoding="utf-8"))
