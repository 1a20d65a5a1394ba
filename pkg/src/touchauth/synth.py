"""Synthetic two-finger touch logs from parameterised behaviour profiles.

Each finger follows a bounded random walk with heading persistence: the
heading drifts by a Gaussian step of ``direction_change_rate`` radians per
event, and each step covers roughly ``speed_scale * dt`` pixels. Walls
reflect the walk. Output is the same text format ``ingest`` reads.
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .ingest import Game, TouchEvent, format_log

SCREEN_WIDTH = 2880.0
SCREEN_HEIGHT = 1440.0
MIN_EVENTS = 14


@dataclass(frozen=True)
class BehaviorProfile:
    user_id: str
    mean_interval: float = 0.008
    jitter: float = 0.2
    speed_scale: float = 500.0
    speed_jitter: float = 0.2
    direction_change_rate: float = 0.2
    pressure_mean: float = 20.0
    pressure_std: float = 2.0
    width_mean: float = 18.0
    width_std: float = 1.0
    phase_offset: float = 0.004
    seed: int = 0

    def __post_init__(self):
        if not self.user_id or "_" in self.user_id or "/" in self.user_id:
            raise ConfigError(f"profile user_id {self.user_id!r} must be non-empty without '_' or '/'")
        if self.mean_interval < 1e-4:
            raise ConfigError("mean_interval must be at least 1e-4 s")
        if not 0 <= self.jitter < 1:
            raise ConfigError("jitter must be in [0, 1)")
        if self.speed_scale <= 0 or self.pressure_mean <= 0 or self.width_mean <= 0:
            raise ConfigError("speed, pressure and width scales must be positive")
        if min(self.speed_jitter, self.direction_change_rate, self.pressure_std, self.width_std, self.phase_offset) < 0:
            raise ConfigError("spreads, direction-change rate and phase offset must be non-negative")

    @classmethod
    def from_dict(cls, data: dict) -> "BehaviorProfile":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown profile field(s): {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        return asdict(self)


def _rng(profile: BehaviorProfile, game: str) -> np.random.Generator:
    return np.random.default_rng([profile.seed, zlib.crc32(game.encode())])


def _reflect(pos: float, heading: float, limit: float, axis: int) -> tuple[float, float]:
    if pos < 0:
        pos = -pos
    elif pos > limit:
        pos = 2 * limit - pos
    else:
        return pos, heading
    heading = math.pi - heading if axis == 0 else -heading
    return min(max(pos, 0.0), limit), heading


def generate_events(profile: BehaviorProfile, n_events: int, game: str = "PUBG") -> list[TouchEvent]:
    if n_events < MIN_EVENTS:
        raise ConfigError(f"n_events must be at least {MIN_EVENTS}, got {n_events}")
    rng = _rng(profile, game)
    intervals = profile.mean_interval * (1 + profile.jitter * rng.uniform(-1, 1, n_events - 1))
    clock = np.concatenate([[0.0], np.cumsum(intervals)])

    pos = [
        [SCREEN_WIDTH * 0.25 + rng.normal(0, 50), SCREEN_HEIGHT * 0.5 + rng.normal(0, 50)],
        [SCREEN_WIDTH * 0.75 + rng.normal(0, 50), SCREEN_HEIGHT * 0.5 + rng.normal(0, 50)],
    ]
    heading = list(rng.uniform(-math.pi, math.pi, 2))
    last_time = [None, None]

    events = []
    for k in range(n_events):
        finger = k % 2
        t = round(float(clock[k]) + (profile.phase_offset if finger else 0.0), 6)
        button = "DOWN" if last_time[finger] is None else "HELD"
        if last_time[finger] is not None:
            dt = t - last_time[finger]
            heading[finger] += rng.normal(0, profile.direction_change_rate) if profile.direction_change_rate else 0.0
            step = profile.speed_scale * dt * math.exp(profile.speed_jitter * rng.normal())
            x = pos[finger][0] + step * math.cos(heading[finger])
            y = pos[finger][1] + step * math.sin(heading[finger])
            x, heading[finger] = _reflect(x, heading[finger], SCREEN_WIDTH, 0)
            y, heading[finger] = _reflect(y, heading[finger], SCREEN_HEIGHT, 1)
            pos[finger] = [x, y]
        last_time[finger] = t
        pressure = max(1.0, rng.normal(profile.pressure_mean, profile.pressure_std))
        width = max(1.0, rng.normal(profile.width_mean, profile.width_std))
        orientation = max(0.0, rng.normal(15.0, 3.0))
        events.append(TouchEvent(
            t,
            round(pos[finger][0], 3),
            round(pos[finger][1], 3),
            button,
            round(width, 2),
            round(orientation, 2),
            round(pressure, 2),
            finger,
        ))
    events.sort(key=lambda e: (e.timestamp, e.finger))
    return events


def generate_log(profile: BehaviorProfile, n_events: int, game: str = "PUBG") -> str:
    """Raw log text (header plus ``n_events`` lines), deterministic per inputs."""
    return format_log(generate_events(profile, n_events, game))


def generate_cohort(profiles: Sequence[BehaviorProfile], n_events: int, out_dir: str | Path,
                    games: Sequence[str] = ("PUBG",)) -> list[Path]:
    """Write ``<user_id>_<game>.txt`` for every profile and game."""
    if len(profiles) < 2:
        raise ConfigError("a cohort needs at least two profiles")
    ids = [p.user_id for p in profiles]
    if len(set(ids)) != len(ids):
        raise ConfigError("duplicate profile ids")
    tags = [Game.parse(g).value for g in games]
    if n_events < MIN_EVENTS:
        raise ConfigError(f"n_events must be at least {MIN_EVENTS}, got {n_events}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for profile in profiles:
        for tag in tags:
            path = out / f"{profile.user_id}_{tag}.txt"
            path.write_text(generate_log(profile, n_events, tag), encoding="utf-8")
            paths.append(path)
    return paths


def profiles_from_json(data) -> list[BehaviorProfile]:
    if isinstance(data, dict):
        data = data.get("profiles")
    if not isinstance(data, list):
        raise ConfigError("profile file must be a list or an object with a 'profiles' list")
    return [BehaviorProfile.from_dict(p) for p in data]


def load_profiles(path: str | Path) -> list[BehaviorProfile]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid profile JSON in {path}: {exc}") from exc
    return profiles_from_json(data)


def separable_cohort(n: int = 8, seed: int = 0) -> list[BehaviorProfile]:
    """Up to 8 profiles on the corners of a (speed, width, turning) cube.

    Every pair differs by the full range in at least one of those traits,
    so no user sits between two others along a single axis.
    """
    if not 2 <= n <= 8:
        raise ConfigError("separable cohort supports 2 to 8 profiles")
    return [
        BehaviorProfile(
            f"user{i:02d}",
            speed_scale=(250.0, 1500.0)[i & 1],
            width_mean=(10.0, 30.0)[(i >> 1) & 1],
            direction_change_rate=(0.05, 0.5)[(i >> 2) & 1],
            pressure_mean=10.0 + 6.0 * i,
            seed=seed * 1000 + i,
        )
        for i in range(n)
    ]


def null_cohort(n: int = 8, seed: int = 0) -> list[BehaviorProfile]:
    """Identical behaviour, different seeds: no user signal at all."""
    return [
        BehaviorProfile(f"user{i:02d}", direction_change_rate=0.8, seed=seed * 1000 + i)
        for i in range(n)
    ]
