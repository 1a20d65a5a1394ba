"""Balanced authentic/imposter datasets for one target user."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, DataError
from .windowing import N_VECTOR, VECTOR_COLUMNS, GestureVector

AUTHENTIC = 0
IMPOSTER = 1
MIN_ENROLLMENT = 10


@dataclass(frozen=True)
class LabeledDataset:
    """Rows of a labelled pool or partition.

    ``row_ids`` index into the vector sequence the pool was built from, so
    partitions can be checked for overlap by identity.
    """

    X: np.ndarray
    y: np.ndarray
    user_ids: tuple[str, ...]
    row_ids: np.ndarray
    target_user: str
    split: str
    seed: int

    def __post_init__(self):
        for arr in (self.X, self.y, self.row_ids):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return int(self.y.shape[0])

    def counts(self) -> dict[str, int]:
        return {"authentic": int(np.sum(self.y == AUTHENTIC)), "imposter": int(np.sum(self.y == IMPOSTER))}

    def take(self, idx: np.ndarray, split: str) -> "LabeledDataset":
        idx = np.asarray(idx, dtype=int)
        return LabeledDataset(
            self.X[idx].copy(),
            self.y[idx].copy(),
            tuple(self.user_ids[i] for i in idx),
            self.row_ids[idx].copy(),
            self.target_user,
            split,
            self.seed,
        )


def build_dataset(target: str, vectors: Sequence[GestureVector], seed: int) -> LabeledDataset:
    """Label the target's vectors 0 and an equal number of sampled others 1.

    Imposter rows are drawn uniformly without replacement from the pooled
    vectors of every other user. If that pool is smaller than the target's,
    the target's rows are subsampled instead.
    """
    own = np.array([i for i, v in enumerate(vectors) if v.user_id == target], dtype=int)
    others = np.array([i for i, v in enumerate(vectors) if v.user_id != target], dtype=int)
    if own.size == 0:
        raise DataError(f"target user {target!r} has no gesture vectors")
    if own.size < MIN_ENROLLMENT:
        raise DataError(f"insufficient enrollment data: {target!r} has {own.size} vectors, need {MIN_ENROLLMENT}")
    if others.size == 0:
        raise DataError("no imposter users present")

    rng = np.random.default_rng(seed)
    n = min(own.size, others.size)
    if own.size > n:
        own = np.sort(rng.choice(own, size=n, replace=False))
    imposters = np.sort(rng.choice(others, size=n, replace=False)) if others.size > n else others

    row_ids = np.concatenate([own, imposters])
    X = np.stack([vectors[i].values for i in row_ids]) if row_ids.size else np.empty((0, N_VECTOR))
    y = np.concatenate([np.full(own.size, AUTHENTIC), np.full(imposters.size, IMPOSTER)])
    users = tuple(vectors[i].user_id for i in row_ids)
    return LabeledDataset(X, y, users, row_ids, target, "pool", seed)


def _cut(n: int, fraction: float) -> int:
    return int(math.floor(fraction * n + 0.5))


def split(pool: LabeledDataset, train_fraction: float = 0.8, seed: int = 0) -> tuple[LabeledDataset, LabeledDataset]:
    """Stratified train/test split; each partition is shuffled afterwards."""
    if not 0.0 < train_fraction < 1.0:
        raise ConfigError(f"train_fraction must be in (0, 1), got {train_fraction}")
    if len(pool) < 5:
        raise DataError(f"pool of {len(pool)} rows is too small to split")
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for label in (AUTHENTIC, IMPOSTER):
        idx = np.flatnonzero(pool.y == label)
        idx = idx[rng.permutation(idx.size)]
        cut = _cut(idx.size, train_fraction)
        if cut == 0 or cut == idx.size:
            raise DataError(f"class {label} has {idx.size} rows; cannot fill both partitions at {train_fraction}")
        train_idx.append(idx[:cut])
        test_idx.append(idx[cut:])
    train = np.concatenate(train_idx)
    test = np.concatenate(test_idx)
    train = train[rng.permutation(train.size)]
    test = test[rng.permutation(test.size)]
    return pool.take(train, "train"), pool.take(test, "test")


def dataset_csv(data: LabeledDataset) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(VECTOR_COLUMNS + ("label",))
    for row, label in zip(data.X, data.y):
        writer.writerow([repr(float(v)) for v in row] + [int(label)])
    return out.getvalue()


def read_dataset_csv(text: str, split_name: str = "", target: str = "", seed: int = 0) -> LabeledDataset:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != VECTOR_COLUMNS + ("label",):
        raise ConfigError("dataset CSV header must be the 44 feature columns followed by 'label'")
    rows = [r for r in reader if r]
    X = np.array([r[:-1] for r in rows], dtype=float).reshape(len(rows), N_VECTOR)
    y = np.array([int(r[-1]) for r in rows], dtype=int)
    if not np.all(np.isin(y, (AUTHENTIC, IMPOSTER))):
        raise ConfigError("labels must be 0 or 1")
    return LabeledDataset(X, y, ("",) * len(rows), np.arange(len(rows)), target, split_name, seed)
