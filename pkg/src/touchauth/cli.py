"""Command-line driver.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .classifiers import TrainConfig, classify_scores, load_model, predict_scores, save_model, train_model
from .classifiers.config import check_variant
from .dataset import build_dataset, dataset_csv, read_dataset_csv, split
from .errors import ConfigError, IngestError, TouchAuthError
from .evaluation import Report, aggregate_report, confusion, metrics, read_report_rows, report_csv, report_row
from .ingest import clean_stream, diagnostics_csv, format_log, read_log, validate_field_order
from .pipeline import (
    MODEL_LABELS,
    derive_seed,
    dump_json,
    expand_inputs,
    featurize_paths,
    load_config,
    resolve_config,
    run_pipeline,
    sha256_file,
    timestamps,
)
from .synth import generate_cohort, load_profiles
from .windowing import read_vectors_csv, vectors_csv

logger = logging.getLogger("touchauth")


class UsageError(Exception):
    pass


def _manifest(command: str, options: dict, inputs: list[Path]) -> str:
    return dump_json({
        "tool": "touchauth",
        "version": __version__,
        "command": command,
        "options": options,
        "inputs": [{"path": str(p), "sha256": sha256_file(p)} for p in inputs],
        "timestamps": timestamps(),
    })


def _option(args, name: str, default=None):
    """Flag value, else the --config file value, else the default."""
    value = getattr(args, name, None)
    if value is not None:
        return value
    return args.config_data.get(name, default)


def _field_order(args):
    order = _option(args, "field_order")
    if isinstance(order, str):
        order = [s.strip() for s in order.split(",")]
    return validate_field_order(order) if order else None


def _models(args, default=("mlp", "gbt", "svc")) -> list[str]:
    models = _option(args, "models", list(default))
    if isinstance(models, str):
        models = [m for m in models.split(",") if m]
    return [check_variant(m) for m in models]


def cmd_ingest(args) -> int:
    paths = expand_inputs(args.logs)
    order = _field_order(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary = []
    for path in paths:
        parsed = read_log(path, order)
        if not parsed.events:
            logger.warning("%s: no events parsed", path)
        cleaned = clean_stream(parsed.events)
        stem = path.name.rsplit(".", 1)[0]
        events = [e for s in cleaned.streams for e in s.events]
        (out / f"{stem}.clean.txt").write_text(format_log(events), encoding="utf-8")
        (out / f"{stem}.diagnostics.csv").write_text(diagnostics_csv(parsed.diagnostics), encoding="utf-8")
        for w in cleaned.warnings:
            logger.warning("%s: %s", path, w)
        summary.append({"path": str(path), "events": len(parsed.events), "kept": len(events),
                        "dropped_duplicates": cleaned.dropped, "diagnostics": len(parsed.diagnostics)})
    options = {"field_order": list(order) if order else None, "files": summary}
    (out / "manifest.json").write_text(_manifest("ingest", options, paths), encoding="utf-8")
    return 0


def cmd_featurize(args) -> int:
    paths = expand_inputs(args.logs)
    window = int(_option(args, "window", 10))
    shuffle = _option(args, "shuffle_rows")
    features = featurize_paths(paths, window, shuffle, _field_order(args))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(vectors_csv(features.vectors), encoding="utf-8")
    options = {"window": window, "shuffle_rows": shuffle, "files": features.inputs}
    Path(f"{out}.manifest.json").write_text(_manifest("featurize", options, paths), encoding="utf-8")
    return 0


def cmd_dataset(args) -> int:
    src = Path(args.features)
    vectors = read_vectors_csv(src.read_text(encoding="utf-8"))
    game = _option(args, "game")
    if game:
        vectors = [v for v in vectors if v.game == game]
    seed = int(_option(args, "seed", 0))
    fraction = float(_option(args, "train_fraction", 0.8))
    pool = build_dataset(args.target, vectors, seed)
    train, test = split(pool, fraction, seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "train.csv").write_text(dataset_csv(train), encoding="utf-8")
    (out / "test.csv").write_text(dataset_csv(test), encoding="utf-8")
    options = {"target": args.target, "game": game, "seed": seed, "train_fraction": fraction,
               "pool": pool.counts(), "train": train.counts(), "test": test.counts()}
    (out / "manifest.json").write_text(_manifest("dataset", options, [src]), encoding="utf-8")
    return 0


def cmd_train(args) -> int:
    src = Path(args.train)
    data = read_dataset_csv(src.read_text(encoding="utf-8"), "train")
    seed = int(_option(args, "seed", 0))
    config = TrainConfig.from_dict(args.config_data.get("model_config"))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    snapshots = {}
    for variant in _models(args):
        model_seed = derive_seed(seed, "model", variant)
        model = train_model(variant, data, config, model_seed)
        save_model(model, out / f"{variant}.json")
        snapshots[variant] = {"seed": model_seed, "config": config.to_dict()[variant], **model.metadata}
    options = {"seed": seed, "models": snapshots}
    (out / "manifest.json").write_text(_manifest("train", options, [src]), encoding="utf-8")
    return 0


def cmd_evaluate(args) -> int:
    model = load_model(args.model)
    test = read_dataset_csv(Path(args.test).read_text(encoding="utf-8"), "test")
    threshold = float(_option(args, "threshold", 0.5))
    scores = predict_scores(model, test.X)
    pred = classify_scores(scores, threshold)
    m = metrics(confusion(pred, test.y))
    row = report_row(args.user or "", args.game or "", MODEL_LABELS[model.variant], m)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report_csv(Report((row,), (), ())), encoding="utf-8")
    if args.scores:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["score", "label"])
        for s, y in zip(scores, test.y):
            writer.writerow([repr(float(s)), int(y)])
        Path(args.scores).write_text(buf.getvalue(), encoding="utf-8")
    return 0


def cmd_report(args) -> int:
    rows = []
    for path in args.rows:
        rows.extend(read_report_rows(Path(path).read_text(encoding="utf-8")))
    group_by = _option(args, "group_by", "model")
    report = aggregate_report(rows, group_by)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report_csv(report), encoding="utf-8")
    return 0


def cmd_synth(args) -> int:
    profiles = load_profiles(args.profiles)
    n_events = int(_option(args, "n_events", 3000))
    games = _option(args, "games", ["PUBG"])
    if isinstance(games, str):
        games = [g for g in games.split(",") if g]
    out = Path(args.out)
    paths = generate_cohort(profiles, n_events, out, games)
    options = {"n_events": n_events, "games": list(games), "profiles": [p.to_dict() for p in profiles],
               "outputs": {p.name: sha256_file(p) for p in paths}}
    (out / "manifest.json").write_text(_manifest("synth", options, [Path(args.profiles)]), encoding="utf-8")
    return 0


def cmd_pipeline(args) -> int:
    raw = dict(args.config_data)
    if not raw:
        raise UsageError("pipeline requires --config")
    for name in ("seed", "window", "train_fraction", "shuffle_rows", "models", "jobs", "threshold", "group_by"):
        value = getattr(args, name, None)
        if value is not None:
            raw[name] = value
    out = Path(args.out or raw.pop("out", "touchauth-run"))
    raw.pop("out", None)
    cfg = resolve_config(raw)
    run_pipeline(cfg, out)
    print(out / "report.csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="touchauth", description="Touch-dynamics continuous authentication toolkit")
    parser.add_argument("--version", action="version", version=f"touchauth {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--config", help="JSON file supplying defaults for this command's options")
        p.set_defaults(func=func)
        return p

    p = add("ingest", cmd_ingest, "parse and clean raw logs")
    p.add_argument("logs", nargs="+")
    p.add_argument("--out", required=True)
    p.add_argument("--field-order", dest="field_order")

    p = add("featurize", cmd_featurize, "logs -> gesture-vector CSV")
    p.add_argument("logs", nargs="+")
    p.add_argument("--out", required=True)
    p.add_argument("--window", type=int)
    p.add_argument("--shuffle-rows", dest="shuffle_rows", type=int, metavar="SEED")
    p.add_argument("--field-order", dest="field_order")

    p = add("dataset", cmd_dataset, "balanced train/test CSVs for one target user")
    p.add_argument("features")
    p.add_argument("--target", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--game")
    p.add_argument("--seed", type=int)
    p.add_argument("--train-fraction", dest="train_fraction", type=float)

    p = add("train", cmd_train, "train models on a train CSV")
    p.add_argument("train")
    p.add_argument("--out", required=True)
    p.add_argument("--models")
    p.add_argument("--seed", type=int)

    p = add("evaluate", cmd_evaluate, "score a model on a test CSV")
    p.add_argument("model")
    p.add_argument("test")
    p.add_argument("--out", required=True)
    p.add_argument("--user")
    p.add_argument("--game")
    p.add_argument("--threshold", type=float)
    p.add_argument("--scores", help="also write raw score,label rows here")

    p = add("report", cmd_report, "aggregate per-user rows into a grouped report")
    p.add_argument("rows", nargs="+")
    p.add_argument("--out", required=True)
    p.add_argument("--group-by", dest="group_by")

    p = add("synth", cmd_synth, "generate synthetic logs from a profile file")
    p.add_argument("profiles")
    p.add_argument("--out", required=True)
    p.add_argument("--n-events", dest="n_events", type=int)
    p.add_argument("--games")

    p = add("pipeline", cmd_pipeline, "run every stage from one config")
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--train-fraction", dest="train_fraction", type=float)
    p.add_argument("--shuffle-rows", dest="shuffle_rows", type=int, metavar="SEED")
    p.add_argument("--models")
    p.add_argument("--jobs", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--group-by", dest="group_by")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.config_data = load_config(args.config) if args.config else {}
        return args.func(args)
    except (ConfigError, IngestError, UsageError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"touchauth {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (TouchAuthError, OSError) as exc:
        print(f"touchauth {args.command}: failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
