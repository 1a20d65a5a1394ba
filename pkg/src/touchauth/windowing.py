"""Fixed-size gesture windows and their 44-value summary vectors."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, ContractError
from .ingest import UserLog, shuffle_rows
from .kinematics import FEATURES, N_FEATURES, KinematicSample, samples_to_arrays, stream_kinematics

logger = logging.getLogger(__name__)

DEFAULT_WINDOW = 10
STATS: tuple[str, ...] = ("avg", "min", "max", "std")
VECTOR_COLUMNS: tuple[str, ...] = tuple(f"{f}_{s}" for f in FEATURES for s in STATS)
N_VECTOR = len(VECTOR_COLUMNS)


@dataclass(frozen=True)
class GestureWindow:
    samples: tuple[KinematicSample, ...]
    user_id: str = ""
    game: str = ""


@dataclass(frozen=True)
class GestureVector:
    values: np.ndarray
    user_id: str = ""
    game: str = ""

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (N_VECTOR,):
            raise ContractError(f"gesture vector must have {N_VECTOR} values, got shape {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def stat(self, feature: str, stat: str) -> float:
        return float(self.values[VECTOR_COLUMNS.index(f"{feature}_{stat}")])


def _check_window(window: int) -> None:
    if not isinstance(window, (int, np.integer)) or window < 2:
        raise ConfigError(f"window must be an integer >= 2, got {window!r}")


def window_gestures(samples: Sequence[KinematicSample], window: int = DEFAULT_WINDOW,
                    user_id: str = "", game: str = "") -> list[GestureWindow]:
    """Consecutive non-overlapping blocks of ``window`` samples; the tail is dropped."""
    _check_window(window)
    count = len(samples) // window
    if count == 0:
        logger.warning("%d samples is fewer than one %d-sample window", len(samples), window)
    return [
        GestureWindow(tuple(samples[i * window:(i + 1) * window]), user_id, game)
        for i in range(count)
    ]


def _running_sum(values: np.ndarray, axis: int) -> np.ndarray:
    # fixed left-to-right order; numpy's reductions may regroup terms
    acc = np.zeros(np.delete(values.shape, axis))
    for k in range(values.shape[axis]):
        acc += np.take(values, k, axis=axis)
    return acc


def aggregate_matrix(values: np.ndarray) -> np.ndarray:
    """Summarise a (W, 11) block as 44 values, feature-major: avg, min, max, std.

    Standard deviation is the population form (divide by W).
    """
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ContractError("non-finite kinematic value in window")
    w = values.shape[0]
    mean = _running_sum(values, axis=0) / w
    dev = values - mean
    std = np.sqrt(_running_sum(dev * dev, axis=0) / w)
    lo = values.min(axis=0)
    hi = values.max(axis=0)
    # rounding can push the mean of near-equal values just outside [min, max]
    mean = np.clip(mean, lo, hi)
    return np.stack([mean, lo, hi, std], axis=1).reshape(-1)


def aggregate_windows(values: np.ndarray, window: int = DEFAULT_WINDOW) -> np.ndarray:
    """Batch form: (n, 11) samples -> (n // window, 44) vectors."""
    _check_window(window)
    values = np.asarray(values, dtype=float)
    count = values.shape[0] // window
    if count == 0:
        return np.empty((0, N_VECTOR))
    blocks = values[: count * window].reshape(count, window, values.shape[1])
    if not np.all(np.isfinite(blocks)):
        raise ContractError("non-finite kinematic value in window")
    mean = _running_sum(blocks, axis=1) / window
    dev = blocks - mean[:, None, :]
    std = np.sqrt(_running_sum(dev * dev, axis=1) / window)
    lo = blocks.min(axis=1)
    hi = blocks.max(axis=1)
    mean = np.clip(mean, lo, hi)
    return np.stack([mean, lo, hi, std], axis=2).reshape(count, -1)


def aggregate(window: GestureWindow) -> GestureVector:
    _, _, values = samples_to_arrays(window.samples)
    if values.shape[0] < 2:
        raise ContractError("window needs at least two samples")
    return GestureVector(aggregate_matrix(values), window.user_id, window.game)


def combined_samples(log: UserLog, shuffle_seed: int | None = None) -> np.ndarray:
    """Both fingers' kinematic samples merged into one (n, 11) matrix.

    Rows are in timestamp order (finger id breaks ties) unless
    ``shuffle_seed`` is given, in which case the merged rows are permuted.
    """
    times, fingers, blocks = [], [], []
    for stream in log.streams:
        t, values = stream_kinematics(stream)
        times.append(t)
        fingers.append(np.full(t.shape[0], stream.finger))
        blocks.append(values)
    if not blocks:
        return np.empty((0, N_FEATURES))
    t = np.concatenate(times)
    f = np.concatenate(fingers)
    values = np.concatenate(blocks)
    order = np.lexsort((f, t))
    values = values[order]
    if shuffle_seed is not None:
        values = values[shuffle_rows(range(values.shape[0]), shuffle_seed)]
    return values


def featurize_log(log: UserLog, window: int = DEFAULT_WINDOW, shuffle_seed: int | None = None) -> list[GestureVector]:
    matrix = aggregate_windows(combined_samples(log, shuffle_seed), window)
    return [GestureVector(row, log.user_id, log.game.value) for row in matrix]


def vectors_csv(vectors: Iterable[GestureVector]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(("user_id", "game") + VECTOR_COLUMNS)
    for v in vectors:
        writer.writerow([v.user_id, v.game] + [repr(float(x)) for x in v.values])
    return out.getvalue()


def read_vectors_csv(text: str) -> list[GestureVector]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        return []
    if tuple(header) != ("user_id", "game") + VECTOR_COLUMNS:
        raise ConfigError("feature CSV header does not match the gesture-vector layout")
    return [GestureVector(np.array(row[2:], dtype=float), row[0], row[1]) for row in reader if row]
