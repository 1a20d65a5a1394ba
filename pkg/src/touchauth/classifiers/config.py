"""Hyper-parameter defaults for the three model families."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

from ..errors import ConfigError


@dataclass(frozen=True)
class MLPConfig:
    hidden: tuple[int, ...] = (64, 32)
    epochs: int = 50
    batch_size: int = 32
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if any(h <= 0 for h in self.hidden) or self.epochs <= 0 or self.batch_size <= 0:
            raise ConfigError("MLP layer sizes, epochs and batch size must be positive")
        if not 0 < self.learning_rate <= 1:
            raise ConfigError("MLP learning rate must be in (0, 1]")


@dataclass(frozen=True)
class GBTConfig:
    trees: int = 100
    max_depth: int = 3
    learning_rate: float = 0.1
    min_samples_leaf: int = 5
    reg_lambda: float = 1.0

    def __post_init__(self):
        if self.trees < 0 or self.max_depth <= 0 or self.min_samples_leaf <= 0:
            raise ConfigError("GBT tree count, depth and leaf size must be positive")
        if not 0 < self.learning_rate <= 1:
            raise ConfigError("GBT learning rate must be in (0, 1]")
        if self.reg_lambda < 0:
            raise ConfigError("reg_lambda must be non-negative")


@dataclass(frozen=True)
class SVCConfig:
    kernel: str = "rbf"
    gamma: float | None = None  # None: 1 / (n_features * variance of training data)
    C: float = 1.0
    tol: float = 1e-3
    max_iter: int = 10000

    def __post_init__(self):
        if self.kernel not in ("rbf", "linear"):
            raise ConfigError(f"unknown SVC kernel {self.kernel!r}")
        if self.C <= 0 or self.tol <= 0 or self.max_iter <= 0:
            raise ConfigError("SVC C, tol and max_iter must be positive")
        if self.gamma is not None and self.gamma <= 0:
            raise ConfigError("SVC gamma must be positive")


VARIANTS = ("mlp", "gbt", "svc")
_CONFIG_TYPES = {"mlp": MLPConfig, "gbt": GBTConfig, "svc": SVCConfig}


@dataclass(frozen=True)
class TrainConfig:
    mlp: MLPConfig = field(default_factory=MLPConfig)
    gbt: GBTConfig = field(default_factory=GBTConfig)
    svc: SVCConfig = field(default_factory=SVCConfig)

    def for_variant(self, variant: str):
        return getattr(self, check_variant(variant))

    def to_dict(self) -> dict:
        return {name: config_to_dict(getattr(self, name)) for name in VARIANTS}

    @classmethod
    def from_dict(cls, data: dict | None) -> "TrainConfig":
        data = data or {}
        unknown = set(data) - set(VARIANTS)
        if unknown:
            raise ConfigError(f"unknown model(s) in config: {sorted(unknown)}")
        return cls(**{name: config_from_dict(name, data.get(name)) for name in VARIANTS})


def check_variant(variant: str) -> str:
    key = variant.lower()
    if key not in VARIANTS:
        raise ConfigError(f"unknown model {variant!r}; expected one of {VARIANTS}")
    return key


def config_to_dict(config) -> dict:
    out = asdict(config)
    for k, v in out.items():
        if isinstance(v, tuple):
            out[k] = list(v)
    return out


def config_from_dict(variant: str, data: dict | None):
    cls = _CONFIG_TYPES[check_variant(variant)]
    data = dict(data or {})
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown {variant} option(s): {sorted(unknown)}")
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
