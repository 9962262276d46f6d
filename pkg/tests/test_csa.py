import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from capcsa.csa import CrowState, CsaConfig, csa_step, init_population, minimize_csa, propose, run_csa
from capcsa.objective import ObjectiveWeights, evaluate_plan
from capcsa.search import CapacitorProblem, evaluator, plan_bounds, spawn_streams

BOX = np.array([[-5.0, 5.0], [-5.0, 5.0]])


def sphere(x):
    return float(np.sum((np.asarray(x) - 1.0) ** 2))


def _evaluate(X):
    return np.array([sphere(x) for x in X])


class FixedRng:
    """Stand-in generator returning scripted draws."""

    def __init__(self, j, follow, r):
        self._j, self._draws = j, [follow, r]

    def integers(self, n):
        return self._j

    def random(self):
        return self._draws.pop(0)

    def uniform(self, lo, hi):
        raise AssertionError("should follow, not reposition")


def test_config_validation():
    with pytest.raises(ValueError):
        CsaConfig(ap=1.5)
    with pytest.raises(ValueError):
        CsaConfig(fl=-1)
    with pytest.raises(ValueError):
        CsaConfig(n_crows=1)


def test_follow_step_arithmetic():
    cfg = CsaConfig(n_crows=2, fl=2.0, ap=0.1, bounds=np.array([[0.0, 10.0]]))
    crows = [CrowState(np.array([5.0]), np.array([5.0]), 1.0),
             CrowState(np.array([0.0]), np.array([8.0]), 0.0)]
    X = propose(crows, cfg, [FixedRng(1, 0.5, 0.5), FixedRng(1, 0.5, 0.0)])
    assert X[0, 0] == pytest.approx(8.0)


def test_zero_flight_length_stays():
    cfg = CsaConfig(n_crows=2, fl=0.0, ap=0.0, bounds=BOX)
    crows = [CrowState(np.array([1.0, 2.0]), np.array([1.0, 2.0]), 1.0),
             CrowState(np.array([-3.0, 4.0]), np.array([0.0, 0.0]), 0.5)]
    X = propose(crows, cfg, spawn_streams(0, 2))
    assert np.array_equal(X[0], crows[0].position)
    assert np.array_equal(X[1], crows[1].position)


def test_full_awareness_repositions():
    cfg = CsaConfig(n_crows=4, fl=0.0, ap=1.0, bounds=BOX)
    crows = [CrowState(np.zeros(2), np.zeros(2), 0.0) for _ in range(4)]
    X = propose(crows, cfg, spawn_streams(1, 4))
    # with fl = 0 any movement comes from random repositioning
    assert np.all(np.any(X != 0.0, axis=1))


def test_init_population(feeder11):
    cfg = CsaConfig(n_crows=20, bounds=plan_bounds(feeder11))
    prob = CapacitorProblem(feeder11, bounds=cfg.bounds)
    with evaluator(prob) as ev:
        crows = init_population(cfg, ev, spawn_streams(3, 20))
        again = init_population(cfg, ev, spawn_streams(3, 20))
    assert len(crows) == 20
    for a, b in zip(crows, again):
        assert np.array_equal(a.position, b.position)
        assert np.all(a.position >= cfg.bounds[:, 0]) and np.all(a.position <= cfg.bounds[:, 1])
        assert np.array_equal(a.memory, a.position)
        assert a.memory_cost == prob(a.memory)


def test_memory_monotone_and_consistent():
    cfg = CsaConfig(n_crows=8, max_iter=30, seed=4, bounds=BOX)
    rngs = spawn_streams(cfg.seed, cfg.n_crows)
    crows = init_population(cfg, _evaluate, rngs)
    for _ in range(cfg.max_iter):
        new = csa_step(crows, cfg, rngs, _evaluate)
        for old, c in zip(crows, new):
            assert c.memory_cost <= old.memory_cost
            assert c.memory_cost == sphere(c.memory)
        crows = new


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 50), st.floats(0, 1), st.integers(0, 2 ** 32))
def test_positions_stay_in_bounds(fl, ap, seed):
    cfg = CsaConfig(n_crows=5, fl=fl, ap=ap, bounds=BOX)
    rngs = spawn_streams(seed, 5)
    crows = init_population(cfg, _evaluate, rngs)
    for _ in range(5):
        crows = csa_step(crows, cfg, rngs, _evaluate)
        for c in crows:
            assert np.all(c.position >= BOX[:, 0]) and np.all(c.position <= BOX[:, 1])


def test_elitism_exhaustive():
    seen = []

    def recording(x):
        c = sphere(x)
        seen.append(c)
        return c

    cfg = CsaConfig(n_crows=6, max_iter=15, seed=9, bounds=BOX)
    res = minimize_csa(recording, cfg)
    assert len(seen) == res.n_evaluations == 6 * 16
    assert res.best_cost == min(seen)
    assert res.history.is_non_increasing()
    assert len(res.history) == 16


def test_sphere_converges():
    res = minimize_csa(sphere, CsaConfig(n_crows=20, max_iter=200, seed=0, bounds=BOX))
    assert res.best_cost < 1e-3


def test_max_iter_zero_returns_initial_best(feeder11):
    res = run_csa(CsaConfig(max_iter=0, seed=5), feeder11)
    assert len(res.history) == 1
    assert res.best_cost == res.history.best_cost_per_iteration[0]


def test_seeded_determinism(feeder11):
    a = run_csa(CsaConfig(n_crows=6, max_iter=10, seed=11), feeder11)
    b = run_csa(CsaConfig(n_crows=6, max_iter=10, seed=11), feeder11)
    assert np.array_equal(a.best_position, b.best_position)
    assert a.best_cost == b.best_cost
    assert a.history == b.history


def test_parallel_matches_serial(feeder11):
    a = run_csa(CsaConfig(n_crows=6, max_iter=5, seed=2), feeder11)
    b = run_csa(CsaConfig(n_crows=6, max_iter=5, seed=2, workers=2), feeder11)
    assert np.array_equal(a.best_position, b.best_position)
    assert a.history == b.history


def test_ieee33_finds_bus_30(feeder11):
    res = run_csa(CsaConfig(seed=0), feeder11)
    (bus, kvar), = res.best_plan.placements
    assert bus == 30
    assert 1300 < kvar < 1600
    cost, sol, rep = evaluate_plan(feeder11, res.best_plan, ObjectiveWeights())
    assert rep.feasible
    assert cost == pytest.approx(res.best_cost)
