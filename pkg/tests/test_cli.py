import json
import subprocess
import sys

import pytest

from touchauth.cli import main
from touchauth.synth import separable_cohort

from conftest import SAMPLE_LOG


def write_profiles(path, n=3):
    path.write_text(json.dumps([p.to_dict() for p in separable_cohort(n)]))
    return path


@pytest.fixture
def logs(tmp_path):
    out = tmp_path / "logs"
    assert main(["synth", str(write_profiles(tmp_path / "p.json")), "--out", str(out), "--n-events", "600"]) == 0
    return out


def test_ingest_valid(tmp_path):
    log = tmp_path / "alice_PUBG.txt"
    log.write_text(SAMPLE_LOG + "0.05 991 476 HELD 18  21 0\n")
    assert main(["ingest", str(log), "--out", str(tmp_path / "out")]) == 0
    diag = (tmp_path / "out" / "alice_PUBG.diagnostics.csv").read_text().splitlines()
    assert len(diag) == 2 and "null field" in diag[1]
    clean = (tmp_path / "out" / "alice_PUBG.clean.txt").read_text().splitlines()
    assert len(clean) == 11
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["options"]["files"][0]["kept"] == 10


def test_ingest_empty_file_is_not_an_error(tmp_path):
    log = tmp_path / "bob_PUBG.txt"
    log.write_text("")
    assert main(["ingest", str(log), "--out", str(tmp_path / "out")]) == 0


def test_ingest_usage_errors(tmp_path, capsys):
    bad = tmp_path / "c_PUBG.txt"
    bad.write_text("Timestamp X Y Velocity\n0 1 2 3\n")
    assert main(["ingest", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert main(["ingest", str(tmp_path / "missing.txt"), "--out", str(tmp_path / "o")]) == 2
    assert "error" in capsys.readouterr().err


def test_synth_deterministic_and_errors(tmp_path, logs):
    again = tmp_path / "again"
    main(["synth", str(tmp_path / "p.json"), "--out", str(again), "--n-events", "600"])
    for path in sorted(logs.glob("*.txt")):
        assert path.read_bytes() == (again / path.name).read_bytes()
    assert main(["synth", str(tmp_path / "p.json"), "--out", str(tmp_path / "x"), "--n-events", "10"]) == 2
    broken = tmp_path / "broken.json"
    broken.write_text("[{")
    assert main(["synth", str(broken), "--out", str(tmp_path / "y")]) == 2


def test_stage_by_stage(tmp_path, logs):
    feats = tmp_path / "features.csv"
    assert main(["featurize", str(logs), "--out", str(feats)]) == 0
    assert json.loads(feats.with_name("features.csv.manifest.json").read_text())["options"]["window"] == 10

    ds = tmp_path / "ds"
    assert main(["dataset", str(feats), "--target", "user01", "--out", str(ds), "--seed", "4"]) == 0
    counts = json.loads((ds / "manifest.json").read_text())["options"]
    assert counts["pool"]["authentic"] == counts["pool"]["imposter"]

    models = tmp_path / "models"
    cfg = tmp_path / "train.json"
    cfg.write_text(json.dumps({"model_config": {"mlp": {"epochs": 5}, "gbt": {"trees": 5}}}))
    assert main(["train", str(ds / "train.csv"), "--out", str(models), "--config", str(cfg)]) == 0
    assert sorted(p.name for p in models.glob("*.json")) == ["gbt.json", "manifest.json", "mlp.json", "svc.json"]

    rows = []
    for variant in ("mlp", "gbt", "svc"):
        out = tmp_path / f"{variant}.csv"
        assert main(["evaluate", str(models / f"{variant}.json"), str(ds / "test.csv"), "--out", str(out),
                     "--user", "user01", "--game", "PUBG", "--scores", str(tmp_path / f"{variant}.scores.csv")]) == 0
        rows.append(str(out))
    report = tmp_path / "report.csv"
    assert main(["report", *rows, "--out", str(report), "--group-by", "game"]) == 0
    lines = report.read_text().splitlines()
    assert lines[0] == "User,Game,Model,Accuracy,F1 Score,FNR,FPR"
    assert lines[-2].startswith("Avg,PUBG,") and lines[-1].startswith("Std,PUBG,")


def test_dataset_insufficient_enrollment(tmp_path, logs):
    feats = tmp_path / "f.csv"
    main(["featurize", str(logs), "--out", str(feats)])
    assert main(["dataset", str(feats), "--target", "nobody", "--out", str(tmp_path / "d")]) == 1


def pipeline_config(tmp_path, **extra):
    cfg = {"synth": {"profiles": "separable", "n_events": 400}, "seed": 3,
           "model_config": {"mlp": {"epochs": 5}, "gbt": {"trees": 5}}, **extra}
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    return path


def test_pipeline_deterministic(tmp_path):
    cfg = pipeline_config(tmp_path)
    assert main(["pipeline", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    assert main(["pipeline", "--config", str(cfg), "--out", str(tmp_path / "b"), "--jobs", "2"]) == 0
    for name in ("report.csv", "manifest.json", "features.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    # a manifest replays as a config
    assert main(["pipeline", "--config", str(tmp_path / "a" / "manifest.json"), "--out", str(tmp_path / "c")]) == 0
    assert (tmp_path / "a" / "report.csv").read_bytes() == (tmp_path / "c" / "report.csv").read_bytes()


def test_pipeline_config_errors(tmp_path):
    assert main(["pipeline", "--config", str(pipeline_config(tmp_path, models=["knn"])), "--out", str(tmp_path / "x")]) == 2
    assert main(["pipeline", "--config", str(pipeline_config(tmp_path, windw=10)), "--out", str(tmp_path / "x")]) == 2
    assert main(["pipeline", "--out", str(tmp_path / "x")]) == 2
    assert not (tmp_path / "x").exists()


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "touchauth.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "touchauth" in res.stdout
