from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    scale: np.ndarray

    def __post_init__(self):
        for name in ("mean", "scale"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Standardizer":
        return cls(np.array(data["mean"], dtype=float), np.array(data["scale"], dtype=float))


def fit_standardizer(X) -> Standardizer:
    """Column means and population standard deviations of the training rows.

    Columns without spread get scale 1 so they map to 0 instead of dividing
    by zero.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise DataError("standardizer needs at least 2 training rows")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    flat = std <= 1e-12 * np.maximum(1.0, np.abs(mean))
    return Standardizer(mean, np.where(flat, 1.0, std))


def apply_standardizer(standardizer: Standardizer, X) -> np.ndarray:
    return (np.asarray(X, dtype=float) - standardizer.mean) / standardizer.scale
