import numpy as np
import pytest
from hypothesis import given, strategies as st

from touchauth.errors import ConfigError, ContractError
from touchauth.evaluation import (
    REPORT_HEADER,
    ConfusionMatrix,
    ReportRow,
    aggregate_report,
    confusion,
    metrics,
    read_report_rows,
    report_csv,
    threshold_sweep,
)

from oracles import count_confusion, rational_metrics

# per-user rows of a reference results table, with its Avg and Std cells
REFERENCE_ROWS = [
    ReportRow("1", "Pubg", "NN", 90.1681, 94.5204, 5.8643, 2.5584),
    ReportRow("2", "Pubg", "NN", 87.6734, 93.1222, 1.65, 2.3626),
    ReportRow("3", "Pubg", "NN", 81.1878, 89.261, 7.8569, 4.5216),
    ReportRow("4", "Pubg", "NN", 81.4061, 89.4612, 6.9879, 3.8542),
    ReportRow("5", "Diep.io", "XGB", 90.9043, 94.9107, 4.1317, 3.2142),
    ReportRow("6", "Diep.io", "XGB", 87.3975, 92.9866, 1.5367, 2.3584),
    ReportRow("7", "Diep.io", "XGB", 91.3465, 95.1467, 2.9321, 4.1263),
    ReportRow("8", "Diep.io", "XGB", 88.9649, 93.8884, 10.1294, 6.3285),
]


def test_confusion_examples():
    assert confusion([0, 1, 1, 0], [0, 1, 1, 0]) == ConfusionMatrix(2, 0, 2, 0)
    assert confusion([1, 1, 1], [0, 0, 0]) == ConfusionMatrix(0, 0, 0, 3)
    assert confusion([0, 1, 0, 1, 0], [0, 0, 0, 1, 1]) == ConfusionMatrix(tp=2, fp=1, tn=1, fn=1)


def test_confusion_errors():
    with pytest.raises(ContractError):
        confusion([0, 1], [0])
    with pytest.raises(ContractError):
        confusion([0, 2], [0, 1])
    with pytest.raises(ContractError):
        confusion([], [])


@given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=60))
def test_confusion_matches_counting(pairs):
    pred = [p for p, _ in pairs]
    truth = [t for _, t in pairs]
    cm = confusion(pred, truth)
    assert (cm.tp, cm.fp, cm.tn, cm.fn) == count_confusion(pred, truth)
    assert cm.total == len(pairs)


def test_metrics_worked_example():
    m = metrics(ConfusionMatrix(tp=8, fp=1, tn=7, fn=4))
    assert m.accuracy == 0.75 and m.fpr == 0.125
    assert m.fnr == pytest.approx(1 / 3) and m.precision == pytest.approx(8 / 9)
    assert m.recall == pytest.approx(2 / 3)
    assert m.f1 == pytest.approx(0.7619047619)
    assert m.degenerate == frozenset()


def test_metrics_perfect_and_degenerate():
    m = metrics(ConfusionMatrix(5, 0, 5, 0))
    assert (m.accuracy, m.f1, m.fpr, m.fnr) == (1.0, 1.0, 0.0, 0.0)
    m = metrics(ConfusionMatrix(0, 0, 4, 3))
    assert m.f1 == 0.0 and {"precision", "f1"} <= m.degenerate
    with pytest.raises(ContractError):
        metrics(ConfusionMatrix(0, 0, 0, 0))


@given(st.integers(0, 20), st.integers(0, 20), st.integers(0, 20), st.integers(0, 20))
def test_metrics_match_rational_oracle(tp, fp, tn, fn):
    if tp + fp + tn + fn == 0:
        return
    m = metrics(ConfusionMatrix(tp, fp, tn, fn))
    exact, flags = rational_metrics(tp, fp, tn, fn)
    for name, value in exact.items():
        assert getattr(m, name) == pytest.approx(float(value), abs=1e-15)
    assert set(m.degenerate) == flags


def test_positive_class_swap():
    pred = np.array([0, 1, 0, 1, 0, 0, 1])
    truth = np.array([0, 0, 0, 1, 1, 1, 1])
    a = metrics(confusion(pred, truth))
    b = metrics(confusion(1 - pred, 1 - truth))
    assert a.accuracy == b.accuracy
    assert a.fpr == b.fnr and a.fnr == b.fpr


def test_reference_averages():
    report = aggregate_report(REFERENCE_ROWS, "model×game")
    by_key = {g.key: g for g in report.groups}
    nn = by_key[("NN", "Pubg")]
    xgb = by_key[("XGB", "Diep.io")]
    assert round(nn.mean["accuracy"], 5) == 85.10885
    assert round(xgb.mean["accuracy"], 4) == 89.6533
    assert round(nn.mean["fnr"], 6) == 5.589775
    assert round(xgb.mean["fpr"], 5) == 4.00685
    # the reference Std cells are sample (n-1) deviations
    assert nn.std["accuracy"] == pytest.approx(4.518772618, abs=1e-8)
    assert xgb.std["accuracy"] == pytest.approx(1.825235641, abs=1e-8)
    pop = {g.key: g for g in aggregate_report(REFERENCE_ROWS, "model×game", ddof=0).groups}
    assert pop[("NN", "Pubg")].std["accuracy"] < nn.std["accuracy"]


def test_group_ordering_and_single_row():
    report = aggregate_report(REFERENCE_ROWS[:1] + REFERENCE_ROWS[4:5], "model")
    assert [g.key for g in report.groups] == [("NN",), ("XGB",)]
    assert all(v == 0 for g in report.groups for v in g.std.values())
    assert aggregate_report([], "game").groups == ()
    with pytest.raises(ConfigError):
        aggregate_report(REFERENCE_ROWS, "user")


def test_identical_rows_mean_equals_row():
    row = REFERENCE_ROWS[2]
    (g,) = aggregate_report([row] * 5, "model").groups
    assert g.mean["accuracy"] == row.accuracy and g.std["accuracy"] == 0


def test_report_csv_layout_and_round_trip():
    report = aggregate_report(REFERENCE_ROWS, "model×game")
    text = report_csv(report)
    lines = text.splitlines()
    assert lines[0] == ",".join(REPORT_HEADER)
    assert lines[1] == "1,Pubg,NN,90.1681,94.5204,5.8643,2.5584"
    assert "Avg,Pubg,NN,85.1089" in text
    assert lines[-1].startswith("Std,Diep.io,XGB,1.8252")
    assert text == report_csv(aggregate_report(REFERENCE_ROWS, "model×game"))
    assert read_report_rows(text) == REFERENCE_ROWS
    with pytest.raises(ConfigError):
        read_report_rows("a,b\n")


def test_threshold_sweep():
    scores = [0.1, 0.4, 0.6, 0.9]
    truth = [0, 0, 1, 1]
    sweep = threshold_sweep(scores, truth, [0.05, 0.5, 0.95])
    assert [m.accuracy for _, m in sweep] == [0.5, 1.0, 0.5]
    assert sweep[0][1].fnr == 1.0 and sweep[2][1].fpr == 1.0
