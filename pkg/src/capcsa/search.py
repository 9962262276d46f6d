"""Pieces shared by the population optimizers: plan encoding, the capacitor
cost function, seeded RNG streams and (optionally parallel) evaluation.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from capcsa.loadflow import SolverSettings
from capcsa.objective import ObjectiveWeights, evaluate_plan
from capcsa.plan import CapacitorPlan


def plan_bounds(network, n_caps=1, size_max_kvar=None):
    """Box bounds ``(2 * n_caps, 2)``: location in [2, L_max], size in [0, total load kvar]."""
    net = getattr(network, "network", network)
    smax = net.total_q_load if size_max_kvar is None else size_max_kvar
    row = [[2.0, float(net.max_bus)], [0.0, float(smax)]]
    return np.array(row * n_caps, dtype=float)


def clip(position, bounds):
    return np.clip(position, bounds[:, 0], bounds[:, 1])


def decode_position(position, bounds):
    """Clamp, round each location dimension to the nearest bus, pair with sizes."""
    x = clip(np.asarray(position, dtype=float), bounds)
    locs = np.floor(x[0::2] + 0.5).astype(int)
    return CapacitorPlan(tuple(zip(locs.tolist(), x[1::2].tolist())))


def encode_plan(plan):
    return np.array([v for bus, kvar in plan.placements for v in (float(bus), kvar)])


@dataclass(frozen=True)
class CapacitorProblem:
    """Picklable objective over encoded plan vectors."""

    network: object
    weights: ObjectiveWeights = field(default_factory=ObjectiveWeights)
    settings: SolverSettings = field(default_factory=SolverSettings)
    bounds: np.ndarray = None

    def __post_init__(self):
        if self.bounds is None:
            object.__setattr__(self, "bounds", plan_bounds(self.network))

    def __call__(self, position):
        cost, _, _ = evaluate_plan(self.network, decode_position(position, self.bounds),
                                   self.weights, self.settings)
        return cost

    def decode(self, position):
        return decode_position(position, self.bounds)


@dataclass
class ConvergenceHistory:
    best_cost_per_iteration: list = field(default_factory=list)

    def append(self, cost):
        self.best_cost_per_iteration.append(float(cost))

    def __len__(self):
        return len(self.best_cost_per_iteration)

    def is_non_increasing(self):
        h = self.best_cost_per_iteration
        return all(b <= a for a, b in zip(h, h[1:]))

    def to_csv(self, path):
        with open(path, "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["iter", "cost"])
            for k, c in enumerate(self.best_cost_per_iteration):
                w.writerow([k, repr(c)])


@dataclass
class OptimizerResult:
    best_position: np.ndarray
    best_cost: float
    history: ConvergenceHistory
    n_evaluations: int
    best_plan: CapacitorPlan = None


def spawn_streams(seed, n):
    """One master seed -> ``n`` independent generators, one per agent.

    Every agent draws only from its own stream, so results do not depend on
    the order in which evaluations complete.
    """
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


@contextmanager
def evaluator(objective, workers=1):
    """Yield ``evaluate(X) -> costs`` preserving input order."""
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            yield lambda X: np.array(list(pool.map(objective, list(X))), dtype=float)
    else:
        yield lambda X: np.array([objective(x) for x in X], dtype=float)
