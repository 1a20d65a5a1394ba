import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import kinematics_loop, wrap_by_search
from touchauth.errors import ContractError
from touchauth.ingest import FingerStream, TouchEvent, clean_stream, parse_log
from touchauth.kinematics import (
    CSV_COLUMNS,
    FEATURES,
    compute_kinematics,
    kinematic_matrix,
    kinematics_csv,
    wrap_angle,
)


def stream_from(t, x, y, w=None, finger=0):
    w = w if w is not None else [18.0] * len(t)
    return FingerStream(finger, tuple(TouchEvent(a, b, c, "HELD", d, 15.0, 20.0, finger) for a, b, c, d in zip(t, x, y, w)))


def random_stream(rng, n):
    t = np.cumsum(rng.uniform(0.001, 0.05, n))
    x = rng.uniform(0, 2880, n)
    y = rng.uniform(0, 1440, n)
    w = rng.uniform(5, 40, n)
    return t, x, y, w


def assert_rel(a, b, rel=1e-9):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = np.maximum(np.abs(a), np.abs(b))
    assert np.all(np.abs(a - b) <= rel * scale), np.max(np.abs(a - b) / np.where(scale > 0, scale, 1))


def test_sample_x_speed(sample_lines):
    stream = clean_stream(parse_log(sample_lines).events).stream(0)
    # prepend two warm-up events so the 2->3 pair lands on an emitted sample
    events = stream.events[:2]
    pre = [TouchEvent(-0.02, 980, 465, "HELD", 18, 15, 20, 0), TouchEvent(-0.01, 982, 466, "HELD", 18, 15, 20, 0)]
    samples = compute_kinematics(FingerStream(0, tuple(pre) + events))
    assert len(samples) == 1
    expected = kinematics_loop([e.timestamp for e in pre + list(events)], [e.x for e in pre + list(events)],
                               [e.y for e in pre + list(events)], [18, 18, 19, 18])[-1][0]
    assert samples[0].x_speed == pytest.approx(expected, rel=1e-12)
    assert samples[0].x_speed == pytest.approx(244.4988, abs=5e-5)


def test_sample_finger0_matches_oracle(sample_lines):
    stream = clean_stream(parse_log(sample_lines).events).stream(0)
    ev = stream.events
    got = [s.features() for s in compute_kinematics(stream)]
    ref = kinematics_loop([e.timestamp for e in ev], [e.x for e in ev], [e.y for e in ev], [e.width_major for e in ev])
    assert len(got) == len(ev) - 3 == 4
    assert_rel(got, ref)


def test_zero_displacement():
    out = kinematic_matrix([0, 0.01, 0.02, 0.03], [5, 5, 5, 5], [7, 7, 7, 7], [1, 1, 1, 1])
    assert np.all(out[:, :7] == 0)


def test_three_four_five():
    out = kinematic_matrix([0, 1, 2, 3], [0, 3, 6, 9], [0, 4, 8, 12], [1, 1, 1, 1])
    assert out[0, 0] == 3 and out[0, 1] == 4 and out[0, 2] == 5


def test_axis_tangents():
    plus_x = kinematic_matrix([0, 1, 2, 3], [0, 1, 2, 3], [0, 0, 0, 0], [1] * 4)
    plus_y = kinematic_matrix([0, 1, 2, 3], [0, 0, 0, 0], [0, 1, 2, 3], [1] * 4)
    minus_x = kinematic_matrix([0, 1, 2, 3], [3, 2, 1, 0], [0, 0, 0, 0], [1] * 4)
    assert plus_x[0, 7] == 0.0
    assert plus_y[0, 7] == pytest.approx(math.pi / 2)
    assert minus_x[0, 7] == math.pi


def test_angular_velocity_wraps_across_pi():
    a, b = math.pi - 0.1, -math.pi + 0.1
    pts = [(0.0, 0.0), (1.0, 0.0)]
    for ang in (a, b):
        px, py = pts[-1]
        pts.append((px + math.cos(ang), py + math.sin(ang)))
    t = [0.0, 0.01, 0.02, 0.03]
    out = kinematic_matrix(t, [p[0] for p in pts], [p[1] for p in pts], [1] * 4)
    assert wrap_by_search(b - a) == pytest.approx(0.2)
    assert out[0, 8] == pytest.approx(20.0, rel=1e-9)


@given(st.floats(-2 * math.pi + 1e-9, 2 * math.pi - 1e-9))
def test_wrap_matches_search_oracle(delta):
    got = float(wrap_angle(np.array([delta]))[0])
    assert -math.pi < got <= math.pi
    assert got == pytest.approx(wrap_by_search(delta), abs=1e-12)


def test_short_stream_is_empty():
    assert compute_kinematics(stream_from([0, 1, 2], [0, 1, 2], [0, 1, 2])) == []


def test_non_increasing_time_is_contract_error():
    with pytest.raises(ContractError):
        kinematic_matrix([0, 1, 1, 2], [0, 1, 2, 3], [0, 0, 0, 0], [1] * 4)


def test_touch_major_and_minor_copy_width():
    out = kinematic_matrix([0, 1, 2, 3, 4], [0, 1, 2, 3, 4], [0] * 5, [10, 11, 12, 13, 14])
    assert out[:, 9].tolist() == [13, 14] and out[:, 10].tolist() == [13, 14]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(4, 60))
def test_matches_oracle_and_invariants(seed, n):
    rng = np.random.default_rng(seed)
    t, x, y, w = random_stream(rng, n)
    out = kinematic_matrix(t, x, y, w)
    assert out.shape == (n - 3, len(FEATURES))
    assert_rel(out, kinematics_loop(list(t), list(x), list(y), list(w)))
    assert np.all(out[:, 2] >= 0)
    assert_rel(out[:, 2] ** 2, out[:, 0] ** 2 + out[:, 1] ** 2)
    assert np.all((out[:, 7] > -math.pi) & (out[:, 7] <= math.pi))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-500, 500), st.floats(-500, 500), st.floats(0, 100))
def test_translation_and_time_shift(seed, dx, dy, dt):
    rng = np.random.default_rng(seed)
    t, x, y, w = random_stream(rng, 20)
    base = kinematic_matrix(t, x, y, w)
    moved = kinematic_matrix(t + dt, x + dx, y + dy, w)
    np.testing.assert_allclose(moved, base, rtol=1e-6, atol=1e-6 * np.abs(base).max())


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 10))
def test_time_scaling(seed, k):
    rng = np.random.default_rng(seed)
    t, x, y, w = random_stream(rng, 20)
    base = kinematic_matrix(t, x, y, w)
    scaled = kinematic_matrix(t * k, x, y, w)
    np.testing.assert_allclose(scaled[:, 0:3], base[:, 0:3] / k, rtol=1e-9)
    np.testing.assert_allclose(scaled[:, 3:6], base[:, 3:6] / k**2, rtol=1e-7, atol=1e-9 * np.abs(base[:, 3:6]).max() / k**2)
    np.testing.assert_allclose(scaled[:, 6], base[:, 6] / k**3, rtol=1e-6, atol=1e-9 * np.abs(base[:, 6]).max() / k**3)
    np.testing.assert_array_equal(scaled[:, 7], base[:, 7])
    np.testing.assert_allclose(scaled[:, 8], base[:, 8] / k, rtol=1e-9)


def test_csv_dump_header():
    samples = compute_kinematics(stream_from([0, 1, 2, 3, 4], [0, 1, 2, 3, 4], [0] * 5))
    lines = kinematics_csv(samples).splitlines()
    assert lines[0].split(",") == list(CSV_COLUMNS) and len(CSV_COLUMNS) == 13
    assert len(lines) == 3
