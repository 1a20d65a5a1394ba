"""End-to-end runs: logs -> features -> per-user datasets -> models -> report."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import shutil
import tempfile
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .classifiers import TrainConfig, classify_scores, predict_scores, train_model
from .classifiers.config import check_variant
from .dataset import build_dataset, split
from .errors import ConfigError, DataError
from .evaluation import ReportRow, aggregate_report, confusion, metrics, report_csv, report_row, GROUPINGS
from .ingest import load_user_log, validate_field_order
from .synth import BehaviorProfile, generate_cohort, null_cohort, profiles_from_json, separable_cohort
from .windowing import GestureVector, featurize_log, vectors_csv

logger = logging.getLogger(__name__)

MODEL_LABELS = {"mlp": "NN", "gbt": "XGB", "svc": "SVC"}
BUILTIN_COHORTS = {"separable": separable_cohort, "null": null_cohort}

DEFAULTS = {
    "seed": 0,
    "window": 10,
    "shuffle_rows": None,
    "train_fraction": 0.8,
    "threshold": 0.5,
    "models": ["mlp", "gbt", "svc"],
    "model_config": {},
    "group_by": "model",
    "field_order": None,
    "jobs": 1,
}


def derive_seed(base: int, *parts: str) -> int:
    key = [int(base)] + [zlib.crc32(p.encode()) for p in parts]
    return int(np.random.SeedSequence(key).generate_state(1)[0])


def sha256_file(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def dump_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def timestamps() -> dict:
    """Run timestamps for manifests.

    Taken from SOURCE_DATE_EPOCH only, so that a rerun of the same config
    produces a byte-identical manifest.
    """
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    return {"source_date_epoch": int(epoch) if epoch and epoch.isdigit() else None}


def load_config(path: str | Path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    # a run manifest replays as its embedded config
    if data.get("tool") == "touchauth" and isinstance(data.get("config"), dict):
        data = data["config"]
    data = dict(data)
    data.setdefault("_base_dir", str(Path(path).resolve().parent))
    return data


def _resolve_profiles(source, base_dir: Path) -> list[BehaviorProfile]:
    if isinstance(source, str) and source in BUILTIN_COHORTS:
        return BUILTIN_COHORTS[source]()
    if isinstance(source, dict) and source.get("builtin") in BUILTIN_COHORTS:
        kwargs = {k: v for k, v in source.items() if k != "builtin"}
        return BUILTIN_COHORTS[source["builtin"]](**kwargs)
    if isinstance(source, str):
        path = Path(source) if Path(source).is_absolute() else base_dir / source
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read profiles {source!r}: {exc}") from exc
        return profiles_from_json(data)
    return profiles_from_json(source)


def resolve_config(raw: dict) -> dict:
    """Fill defaults, validate, and inline synthetic profiles."""
    raw = dict(raw)
    base_dir = Path(raw.pop("_base_dir", "."))
    unknown = set(raw) - set(DEFAULTS) - {"inputs", "synth"}
    if unknown:
        raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
    cfg = {k: raw.get(k, v) for k, v in DEFAULTS.items()}
    models = cfg["models"]
    if isinstance(models, str):
        models = [m for m in models.split(",") if m]
    if not models:
        raise ConfigError("at least one model is required")
    cfg["models"] = [check_variant(m) for m in models]
    cfg["model_config"] = TrainConfig.from_dict(cfg["model_config"]).to_dict()
    if cfg["group_by"] not in GROUPINGS:
        raise ConfigError(f"group_by must be one of {sorted(GROUPINGS)}")
    if not isinstance(cfg["window"], int) or cfg["window"] < 2:
        raise ConfigError("window must be an integer >= 2")
    if not 0 < float(cfg["train_fraction"]) < 1:
        raise ConfigError("train_fraction must be in (0, 1)")
    if not 0 < float(cfg["threshold"]) < 1:
        raise ConfigError("threshold must be in (0, 1)")
    if cfg["shuffle_rows"] is not None and not isinstance(cfg["shuffle_rows"], int):
        raise ConfigError("shuffle_rows must be an integer seed or null")
    if cfg["field_order"] is not None:
        cfg["field_order"] = list(validate_field_order(cfg["field_order"]))
    if not isinstance(cfg["jobs"], int) or cfg["jobs"] < 1:
        raise ConfigError("jobs must be a positive integer")

    if ("inputs" in raw) == ("synth" in raw):
        raise ConfigError("config must name exactly one of 'inputs' (log files) or 'synth' (profiles)")
    if "synth" in raw:
        synth = dict(raw["synth"])
        profiles = _resolve_profiles(synth.get("profiles", "separable"), base_dir)
        cfg["synth"] = {
            "profiles": [p.to_dict() for p in profiles],
            "n_events": int(synth.get("n_events", 3000)),
            "games": list(synth.get("games", ["PUBG"])),
        }
    else:
        inputs = raw["inputs"]
        if isinstance(inputs, str):
            inputs = [inputs]
        resolved = []
        for item in inputs:
            p = Path(item)
            resolved.append(str(p if p.is_absolute() else (base_dir / p)))
        cfg["inputs"] = resolved
    return cfg


def expand_inputs(paths: Sequence[str | Path]) -> list[Path]:
    out = []
    for item in paths:
        p = Path(item)
        if p.is_dir():
            out.extend(sorted(q for q in p.iterdir() if q.suffix == ".txt"))
        elif p.exists():
            out.append(p)
        else:
            raise FileNotFoundError(f"no such input: {p}")
    return out


@dataclass
class FeatureSet:
    vectors: list[GestureVector]
    inputs: list[dict] = field(default_factory=list)


def featurize_paths(paths: Sequence[Path], window: int, shuffle_seed: int | None,
                    field_order=None, names: Sequence[str] | None = None) -> FeatureSet:
    vectors: list[GestureVector] = []
    inputs = []
    for i, path in enumerate(paths):
        log, parsed, cleaned = load_user_log(path, field_order)
        file_seed = None if shuffle_seed is None else derive_seed(shuffle_seed, log.user_id, log.game.value)
        vecs = featurize_log(log, window, file_seed)
        vectors.extend(vecs)
        inputs.append({
            "path": names[i] if names else str(path),
            "sha256": sha256_file(path),
            "user_id": log.user_id,
            "game": log.game.value,
            "events": len(parsed.events),
            "diagnostics": len(parsed.diagnostics),
            "dropped_duplicates": cleaned.dropped,
            "gesture_vectors": len(vecs),
        })
    return FeatureSet(vectors, inputs)


@dataclass
class UserJob:
    user: str
    game: str
    vectors: list[GestureVector]
    models: list[str]
    model_config: dict
    train_fraction: float
    threshold: float
    seed: int


def run_user(job: UserJob) -> tuple[list[ReportRow], dict]:
    """Train and score every requested model for one target user."""
    ds_seed = derive_seed(job.seed, "dataset", job.user, job.game)
    pool = build_dataset(job.user, job.vectors, ds_seed)
    train, test = split(pool, job.train_fraction, ds_seed)
    config = TrainConfig.from_dict(job.model_config)
    rows = []
    info = {"dataset_seed": ds_seed, "pool": pool.counts(), "train": train.counts(), "test": test.counts(), "models": {}}
    for variant in job.models:
        model_seed = derive_seed(job.seed, "model", variant, job.user, job.game)
        model = train_model(variant, train, config, model_seed)
        pred = classify_scores(predict_scores(model, test.X), job.threshold)
        m = metrics(confusion(pred, test.y))
        rows.append(report_row(job.user, job.game, MODEL_LABELS[variant], m))
        info["models"][variant] = {"seed": model_seed, **model.metadata}
    return rows, info


def run_pipeline(cfg: dict, out_dir: str | Path) -> dict:
    """Run a resolved config and write report.csv, features.csv and manifest.json.

    Outputs are staged in a sibling temporary directory and only moved into
    ``out_dir`` once every stage has succeeded.
    """
    out = Path(out_dir)
    out.parent.mkdir(parents=True, exist_ok=True)
    stage = Path(tempfile.mkdtemp(prefix=f".{out.name}.partial-", dir=out.parent))
    try:
        manifest = _run(cfg, stage)
        out.mkdir(exist_ok=True)
        for item in sorted(stage.iterdir()):
            target = out / item.name
            if target.is_dir():
                shutil.rmtree(target)
            os.replace(item, target)
        return manifest
    finally:
        shutil.rmtree(stage, ignore_errors=True)


def _run(cfg: dict, stage: Path) -> dict:
    if "synth" in cfg:
        profiles = [BehaviorProfile.from_dict(p) for p in cfg["synth"]["profiles"]]
        paths = generate_cohort(profiles, cfg["synth"]["n_events"], stage / "logs", cfg["synth"]["games"])
        names = [f"logs/{p.name}" for p in paths]
    else:
        paths = expand_inputs(cfg["inputs"])
        names = [str(p) for p in paths]
    features = featurize_paths(paths, cfg["window"], cfg["shuffle_rows"], cfg["field_order"], names)
    (stage / "features.csv").write_text(vectors_csv(features.vectors), encoding="utf-8")

    by_game: dict[str, list[GestureVector]] = {}
    for v in features.vectors:
        by_game.setdefault(v.game, []).append(v)

    jobs, skipped = [], []
    for game in sorted(by_game):
        vecs = by_game[game]
        users = sorted({v.user_id for v in vecs})
        if len(users) < 2:
            skipped.append({"game": game, "user": users[0] if users else "", "reason": "no imposter users"})
            continue
        for user in users:
            n_own = sum(1 for v in vecs if v.user_id == user)
            if n_own < 10:
                skipped.append({"game": game, "user": user, "reason": f"insufficient enrollment data ({n_own} vectors)"})
                continue
            jobs.append(UserJob(user, game, vecs, cfg["models"], cfg["model_config"],
                                float(cfg["train_fraction"]), float(cfg["threshold"]), int(cfg["seed"])))
    if not jobs:
        raise DataError("no target user has enough data to build a dataset")

    if cfg["jobs"] > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg["jobs"]) as pool:
            results = list(pool.map(run_user, jobs))
    else:
        results = [run_user(job) for job in jobs]

    rows = [row for job_rows, _ in results for row in job_rows]
    report = aggregate_report(rows, cfg["group_by"])
    (stage / "report.csv").write_text(report_csv(report), encoding="utf-8")

    manifest_cfg = {k: v for k, v in cfg.items() if k != "jobs"}
    manifest = {
        "tool": "touchauth",
        "version": __version__,
        "command": "pipeline",
        "config": manifest_cfg,
        "inputs": features.inputs,
        "seeds": {"base": int(cfg["seed"]), "shuffle_rows": cfg["shuffle_rows"]},
        "window": cfg["window"],
        "shuffle_mode": "timestamp" if cfg["shuffle_rows"] is None else "shuffled",
        "train_fraction": cfg["train_fraction"],
        "model_configs": {m: cfg["model_config"][m] for m in cfg["models"]},
        "runs": [{"user": j.user, "game": j.game, **info} for j, (_, info) in zip(jobs, results)],
        "skipped": skipped,
        "outputs": {
            name: sha256_file(stage / name) for name in ("features.csv", "report.csv")
        },
        "timestamps": timestamps(),
    }
    (stage / "manifest.json").write_text(dump_json(manifest), encoding="utf-8")
    return manifest
