import numpy as np
import pytest
from hypothesis import given, strategies as st

from capcsa.plan import CapacitorPlan
from capcsa.search import ConvergenceHistory, decode_position, encode_plan, plan_bounds, spawn_streams


@pytest.fixture(scope="module")
def bounds(feeder11):
    return plan_bounds(feeder11)


def test_bounds(bounds):
    assert bounds.tolist() == [[2.0, 33.0], [0.0, 2300.0]]


def test_bounds_multi(feeder11):
    b = plan_bounds(feeder11, n_caps=3, size_max_kvar=900)
    assert b.shape == (6, 2)
    assert b[5].tolist() == [0.0, 900.0]


def test_decode_table_solution(bounds):
    assert decode_position([30.0, 1579.0], bounds) == CapacitorPlan.single(30, 1579.0)


@pytest.mark.parametrize("vec, bus, kvar", [
    ([1.2, 500.0], 2, 500.0),
    ([-40.0, -5.0], 2, 0.0),
    ([40.0, 9999.0], 33, 2300.0),
    ([29.5, 10.0], 30, 10.0),
    ([29.49, 10.0], 29, 10.0),
])
def test_decode_repairs(bounds, vec, bus, kvar):
    assert decode_position(vec, bounds) == CapacitorPlan.single(bus, kvar)


class _FakeNet:
    max_bus = 33
    total_q_load = 2300.0


@given(st.lists(st.tuples(st.integers(2, 33), st.floats(0, 2300)), min_size=1, max_size=4))
def test_round_trip(placements):
    plan = CapacitorPlan(tuple(placements))
    b = plan_bounds(_FakeNet(), n_caps=len(placements))
    assert decode_position(encode_plan(plan), b) == plan


def test_streams_are_reproducible():
    a = [r.random(3) for r in spawn_streams(7, 4)]
    b = [r.random(3) for r in spawn_streams(7, 4)]
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert not np.array_equal(a[0], a[1])


def test_history_csv(tmp_path):
    h = ConvergenceHistory([3.0, 2.5, 2.5])
    assert h.is_non_increasing()
    h.to_csv(tmp_path / "h.csv")
    assert (tmp_path / "h.csv").read_text().splitlines() == ["iter,cost", "0,3.0", "1,2.5", "2,2.5"]
    assert not ConvergenceHistory([1.0, 2.0]).is_non_increasing()
