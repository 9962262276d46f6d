"""Global-best particle swarm baseline on the same encoding as crow search."""

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
class ParticleState:
    position: np.ndarray
    velocity: np.ndarray
    pbest: np.ndarray
    pbest_cost: float


@dataclass(frozen=True)
class PsoConfig:
    n_particles: int = 20
    max_iter: int = 100
    w: float = 0.729
    c1: float = 1.494
    c2: float = 1.494
    v_max: np.ndarray = field(default=None, compare=False)  # defaults to 20% of each range
    seed: int = 0
    bounds: np.ndarray = field(default=None, compare=False)
    workers: int = 1

    def __post_init__(self):
        if min(self.w, self.c1, self.c2) < 0:
            raise ValueError("w, c1, c2 must be >= 0")
        if self.n_particles < 2:
            raise ValueError("n_particles must be >= 2")
        if self.max_iter < 0:
            raise ValueError("max_iter must be >= 0")

    def vmax(self):
        if self.v_max is not None:
            return np.broadcast_to(np.asarray(self.v_max, dtype=float), (len(self.bounds),))
        return 0.2 * (self.bounds[:, 1] - self.bounds[:, 0])


def init_swarm(config, evaluate, rngs):
    lo, hi = config.bounds[:, 0], config.bounds[:, 1]
    vmax = config.vmax()
    X, V = [], []
    for rng in rngs:
        X.append(rng.uniform(lo, hi))
        V.append(rng.uniform(-vmax, vmax))
    costs = evaluate(np.array(X))
    return [ParticleState(x, v, x.copy(), float(c)) for x, v, c in zip(X, V, costs)]


def move(particle, gbest, config, r1, r2):
    vmax = config.vmax()
    v = (config.w * particle.velocity
         + config.c1 * r1 * (particle.pbest - particle.position)
         + config.c2 * r2 * (gbest - particle.position))
    v = np.clip(v, -vmax, vmax)
    return clip(particle.position + v, config.bounds), v


def pso_step(particles, gbest, gbest_cost, config, rngs, evaluate):
    """Move every particle, evaluate, then update pbest and gbest in particle order."""
    dim = len(config.bounds)
    moved = [move(p, gbest, config, rng.random(dim), rng.random(dim))
             for p, rng in zip(particles, rngs)]
    costs = evaluate(np.array([x for x, _ in moved]))
    new = []
    for p, (x, v), c in zip(particles, moved, costs):
        if c < p.pbest_cost:
            new.append(ParticleState(x, v, x.copy(), float(c)))
        else:
            new.append(ParticleState(x, v, p.pbest, p.pbest_cost))
    k = int(np.argmin([p.pbest_cost for p in new]))
    if new[k].pbest_cost < gbest_cost:
        gbest, gbest_cost = new[k].pbest.copy(), new[k].pbest_cost
    return new, gbest, gbest_cost


def minimize_pso(objective, config):
    if config.bounds is None:
        raise ValueError("config.bounds is required")
    rngs = spawn_streams(config.seed, config.n_particles)
    history = ConvergenceHistory()
    with evaluator(objective, config.workers) as evaluate:
        swarm = init_swarm(config, evaluate, rngs)
        k = int(np.argmin([p.pbest_cost for p in swarm]))
        gbest, gbest_cost = swarm[k].pbest.copy(), swarm[k].pbest_cost
        history.append(gbest_cost)
        for _ in range(config.max_iter):
            swarm, gbest, gbest_cost = pso_step(swarm, gbest, gbest_cost, config, rngs, evaluate)
            history.append(gbest_cost)
    return OptimizerResult(gbest, gbest_cost, history,
                           n_evaluations=config.n_particles * (config.max_iter + 1))


def run_pso(config, network, weights=None, settings=None, n_caps=1):
    if config.bounds is None:
        config = replace(config, bounds=plan_bounds(network, n_caps))
    kw = {k: v for k, v in (("weights", weights), ("settings", settings)) if v is not None}
    problem = CapacitorProblem(network, bounds=config.bounds, **kw)
    result = minimize_pso(problem, config)
    result.best_plan = problem.decode(result.best_position)
    return result
