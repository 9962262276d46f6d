"""Crow search over box-bounded vectors.

Each crow keeps a memory (its best position so far). On every step crow ``i``
picks a random crow ``j``; unless ``j`` is aware of being followed
(probability ``ap``) crow ``i`` flies towards ``j``'s memory by a random
fraction of ``fl``; otherwise it lands at a uniformly random position.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from capcsa.search import (
    CapacitorProblem,
    ConvergenceHistory,
    OptimizerResult,
    clip,
    evaluator,
    plan_bounds,
    spawn_streams,
)


@dataclass
class CrowState:
    position: np.ndarray
    memory: np.ndarray
    memory_cost: float


@dataclass(frozen=True)
class CsaConfig:
    n_crows: int = 20
    max_iter: int = 100
    fl: float = 2.0
    ap: float = 0.1
    seed: int = 0
    bounds: np.ndarray = field(default=None, compare=False)
    workers: int = 1

    def __post_init__(self):
        if not 0.0 <= self.ap <= 1.0:
            raise ValueError("ap must lie in [0, 1]")
        if self.fl < 0:
            raise ValueError("fl must be >= 0")
        if self.n_crows < 2:
            raise ValueError("n_crows must be >= 2")
        if self.max_iter < 0:
            raise ValueError("max_iter must be >= 0")


def init_population(config, evaluate, rngs):
    lo, hi = config.bounds[:, 0], config.bounds[:, 1]
    X = np.array([rng.uniform(lo, hi) for rng in rngs])
    costs = evaluate(X)
    return [CrowState(x.copy(), x.copy(), float(c)) for x, c in zip(X, costs)]


def propose(crows, config, rngs):
    """New positions for every crow; all randomness is drawn here."""
    lo, hi = config.bounds[:, 0], config.bounds[:, 1]
    n = len(crows)
    out = []
    for i, rng in enumerate(rngs):
        j = int(rng.integers(n))
        if rng.random() >= config.ap:
            r = rng.random()
            x = crows[i].position + r * config.fl * (crows[j].memory - crows[i].position)
        else:
            x = rng.uniform(lo, hi)
        out.append(clip(x, config.bounds))
    return np.array(out)


def csa_step(crows, config, rngs, evaluate):
    """One synchronous step: propose, evaluate, then update memories in crow order."""
    X = propose(crows, config, rngs)
    costs = evaluate(X)
    new = []
    for crow, x, c in zip(crows, X, costs):
        if c < crow.memory_cost:
            new.append(CrowState(x, x.copy(), float(c)))
        else:
            new.append(CrowState(x, crow.memory, crow.memory_cost))
    return new


def _best(crows):
    k = int(np.argmin([c.memory_cost for c in crows]))
    return crows[k]


def minimize_csa(objective, config, callback=None):
    """Minimize ``objective`` over ``config.bounds``.

    The history holds the global best after initialisation (entry 0) and after
    each of the ``max_iter`` steps.
    """
    if config.bounds is None:
        raise ValueError("config.bounds is required")
    rngs = spawn_streams(config.seed, config.n_crows)
    history = ConvergenceHistory()
    with evaluator(objective, config.workers) as evaluate:
        crows = init_population(config, evaluate, rngs)
        history.append(_best(crows).memory_cost)
        for it in range(config.max_iter):
            crows = csa_step(crows, config, rngs, evaluate)
            history.append(_best(crows).memory_cost)
            if callback is not None:
                callback(it, crows)
    best = _best(crows)
    return OptimizerResult(best.memory.copy(), best.memory_cost, history,
                           n_evaluations=config.n_crows * (config.max_iter + 1))


def run_csa(config, network, weights=None, settings=None, n_caps=1):
    """Capacitor sizing/placement with crow search; returns an :class:`OptimizerResult`."""
    if config.bounds is None:
        config = replace(config, bounds=plan_bounds(network, n_caps))
    kw = {k: v for k, v in (("weights", weights), ("settings", settings)) if v is not None}
    problem = CapacitorProblem(network, bounds=config.bounds, **kw)
    result = minimize_csa(problem, config)
    result.best_plan = problem.decode(result.best_position)
    return result
