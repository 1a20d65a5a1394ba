import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from touchauth.dataset import AUTHENTIC, IMPOSTER, build_dataset, dataset_csv, read_dataset_csv, split
from touchauth.errors import ConfigError, DataError
from touchauth.windowing import GestureVector


def cohort(counts, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for user, n in counts.items():
        out.extend(GestureVector(rng.normal(size=44), user, "PUBG") for _ in range(n))
    return out


def test_target_100_vs_39_imposters():
    counts = {"target": 100, **{f"u{i:02d}": 100 for i in range(39)}}
    pool = build_dataset("target", cohort(counts), seed=1)
    assert pool.counts() == {"authentic": 100, "imposter": 100}
    assert all(u == "target" for u, y in zip(pool.user_ids, pool.y) if y == AUTHENTIC)
    assert all(u != "target" for u, y in zip(pool.user_ids, pool.y) if y == IMPOSTER)


def test_exact_size_pool_takes_everything():
    vectors = cohort({"a": 50, "b": 50})
    pool = build_dataset("a", vectors, 3)
    assert pool.counts() == {"authentic": 50, "imposter": 50}
    assert sorted(pool.row_ids[pool.y == IMPOSTER]) == list(range(50, 100))


def test_small_imposter_pool_downsamples_authentic():
    pool = build_dataset("a", cohort({"a": 100, "b": 30}), 3)
    assert pool.counts() == {"authentic": 30, "imposter": 30}


def test_build_errors():
    vectors = cohort({"a": 9, "b": 50})
    with pytest.raises(DataError, match="insufficient enrollment data"):
        build_dataset("a", vectors, 0)
    with pytest.raises(DataError):
        build_dataset("zzz", vectors, 0)
    with pytest.raises(DataError):
        build_dataset("b", cohort({"b": 20}), 0)


def test_split_80_20():
    pool = build_dataset("a", cohort({"a": 100, "b": 100, "c": 100}), 0)
    train, test = split(pool, 0.8, seed=4)
    assert train.counts() == {"authentic": 80, "imposter": 80}
    assert test.counts() == {"authentic": 20, "imposter": 20}
    assert len(train) == 160 and len(test) == 40


def test_split_even():
    pool = build_dataset("a", cohort({"a": 10, "b": 10}), 0)
    train, test = split(pool, 0.5, seed=0)
    assert train.counts() == {"authentic": 5, "imposter": 5} == test.counts()


def test_split_determinism_and_seed_sensitivity():
    pool = build_dataset("a", cohort({"a": 60, "b": 60}), 0)
    a1, b1 = split(pool, 0.8, 9)
    a2, b2 = split(pool, 0.8, 9)
    assert dataset_csv(a1) == dataset_csv(a2) and dataset_csv(b1) == dataset_csv(b2)
    a3, _ = split(pool, 0.8, 10)
    assert a3.row_ids.tolist() != a1.row_ids.tolist()


def test_split_errors():
    pool = build_dataset("a", cohort({"a": 10, "b": 10}), 0)
    with pytest.raises(ConfigError):
        split(pool, 1.0, 0)
    with pytest.raises(DataError):
        split(pool, 0.99, 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(10, 80), st.integers(10, 80), st.floats(0.2, 0.8), st.integers(0, 10**6))
def test_split_partition_properties(n_a, n_b, frac, seed):
    pool = build_dataset("a", cohort({"a": n_a, "b": n_b}, seed % 7), seed)
    train, test = split(pool, frac, seed)
    tr, te = set(train.row_ids.tolist()), set(test.row_ids.tolist())
    assert not tr & te
    assert tr | te == set(pool.row_ids.tolist())
    assert abs(train.counts()["authentic"] - train.counts()["imposter"]) <= 1
    assert abs(test.counts()["authentic"] - test.counts()["imposter"]) <= 1


def test_csv_round_trip():
    pool = build_dataset("a", cohort({"a": 12, "b": 12}), 0)
    text = dataset_csv(pool)
    assert text.splitlines()[0].endswith(",label")
    back = read_dataset_csv(text)
    np.testing.assert_array_equal(back.X, pool.X)
    np.testing.assert_array_equal(back.y, pool.y)
