"""Per-event kinematic features computed within one finger's stream.

All derivatives are backward finite differences over consecutive events of
the same finger. The first three events of a stream only serve as warm-up
(jerk needs four positions), so a stream of n events yields n - 3 samples.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import astuple, dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractError
from .ingest import FingerStream

logger = logging.getLogger(__name__)

FEATURES: tuple[str, ...] = (
    "x_speed",
    "y_speed",
    "speed",
    "x_accel",
    "y_accel",
    "accel",
    "jerk",
    "path_tangent",
    "angular_velocity",
    "touch_major",
    "touch_minor",
)
N_FEATURES = len(FEATURES)
WARMUP = 3

CSV_COLUMNS: tuple[str, ...] = ("timestamp", "finger") + FEATURES


@dataclass(frozen=True, slots=True)
class KinematicSample:
    timestamp: float
    finger: int
    x_speed: float
    y_speed: float
    speed: float
    x_accel: float
    y_accel: float
    accel: float
    jerk: float
    path_tangent: float
    angular_velocity: float
    touch_major: float
    touch_minor: float

    def features(self) -> tuple[float, ...]:
        return astuple(self)[2:]


def wrap_angle(delta):
    """Wrap angle differences into (-pi, pi]."""
    return delta - 2.0 * np.pi * np.ceil((delta - np.pi) / (2.0 * np.pi))


def kinematic_matrix(t, x, y, width) -> np.ndarray:
    """Feature matrix of shape (n - 3, 11) for one finger's arrays.

    Columns follow ``FEATURES``. Inputs must have strictly increasing ``t``.
    """
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    width = np.asarray(width, dtype=float)
    n = t.shape[0]
    if n < WARMUP + 1:
        return np.empty((0, N_FEATURES))
    dt = np.diff(t)
    if not np.all(dt > 0):
        raise ContractError("timestamps must be strictly increasing within a finger stream")

    # index k of each diff array corresponds to event k + 1
    vx = np.diff(x) / dt
    vy = np.diff(y) / dt
    speed = np.sqrt(vx * vx + vy * vy)
    # libm atan2 rather than numpy's vector kernel, which can differ by an ulp;
    # at a reversal that ulp decides the sign of the wrapped turn
    tangent = np.array([math.atan2(b, a) for a, b in zip(np.diff(x).tolist(), np.diff(y).tolist())])
    tangent[tangent == -np.pi] = np.pi

    dt2 = dt[1:]
    ax = np.diff(vx) / dt2
    ay = np.diff(vy) / dt2
    accel = np.diff(speed) / dt2
    omega = wrap_angle(np.diff(tangent)) / dt2

    jerk = np.diff(accel) / dt[2:]

    out = np.empty((n - WARMUP, N_FEATURES))
    out[:, 0] = vx[2:]
    out[:, 1] = vy[2:]
    out[:, 2] = speed[2:]
    out[:, 3] = ax[1:]
    out[:, 4] = ay[1:]
    out[:, 5] = accel[1:]
    out[:, 6] = jerk
    out[:, 7] = tangent[2:]
    out[:, 8] = omega[1:]
    out[:, 9] = width[WARMUP:]
    out[:, 10] = width[WARMUP:]
    return out


def stream_arrays(stream: FingerStream) -> tuple[np.ndarray, ...]:
    ev = stream.events
    return (
        np.array([e.timestamp for e in ev], dtype=float),
        np.array([e.x for e in ev], dtype=float),
        np.array([e.y for e in ev], dtype=float),
        np.array([e.width_major for e in ev], dtype=float),
    )


def stream_kinematics(stream: FingerStream) -> tuple[np.ndarray, np.ndarray]:
    """(timestamps, feature matrix) for the emitted samples of a stream."""
    if len(stream.events) < WARMUP + 1:
        logger.warning("finger %d stream has %d events; no kinematic samples", stream.finger, len(stream.events))
        return np.empty(0), np.empty((0, N_FEATURES))
    t, x, y, w = stream_arrays(stream)
    return t[WARMUP:], kinematic_matrix(t, x, y, w)


def compute_kinematics(stream: FingerStream) -> list[KinematicSample]:
    times, values = stream_kinematics(stream)
    return [
        KinematicSample(float(ts), stream.finger, *map(float, row))
        for ts, row in zip(times, values)
    ]


def samples_to_arrays(samples: Sequence[KinematicSample]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if not samples:
        return np.empty(0), np.empty(0, dtype=int), np.empty((0, N_FEATURES))
    times = np.array([s.timestamp for s in samples], dtype=float)
    fingers = np.array([s.finger for s in samples], dtype=int)
    values = np.array([s.features() for s in samples], dtype=float)
    return times, fingers, values


def kinematics_csv(samples: Iterable[KinematicSample]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for s in samples:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in astuple(s)])
    return out.getvalue()


def is_finite_sample(sample: KinematicSample) -> bool:
    return all(math.isfinite(v) for v in sample.features())
