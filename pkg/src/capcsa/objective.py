"""Penalized cost of a capacitor plan given its load-flow result."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from capcsa.loadflow import solve_loadflow

V_MIN = 0.9
V_MAX = 1.0
DIVERGENCE_PENALTY = 1e6


@dataclass(frozen=True)
class ObjectiveWeights:
    p_cost: float = 0.0036  # per kW of active loss
    q_cost: float = 0.0036  # per kvar of reactive loss
    cap_cost: float = 0.00025  # per kvar installed
    penalty_voltage: float = 100.0  # per p.u. of summed limit violation
    penalty_capsize: float = 1.0  # per kvar above total load kvar

    def __post_init__(self):
        for name in ("p_cost", "q_cost", "cap_cost", "penalty_voltage", "penalty_capsize"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    def scaled(self, factor):
        return ObjectiveWeights(*(factor * getattr(self, f) for f in
                                  ("p_cost", "q_cost", "cap_cost", "penalty_voltage", "penalty_capsize")))


@dataclass(frozen=True)
class ConstraintReport:
    voltage_violation: float  # p.u., summed over buses
    capsize_violation: float  # kvar
    location_valid: bool

    @property
    def feasible(self):
        return self.location_valid and self.voltage_violation == 0 and self.capsize_violation == 0


def fitness(solution, plan, weights):
    """Raw cost: weighted losses + installed kvar + summed voltage deviation."""
    vd = float(np.sum(np.abs(solution.vm - 1.0)))
    return (weights.p_cost * solution.total_p_loss
            + weights.q_cost * solution.total_q_loss
            + weights.cap_cost * plan.total_kvar
            + vd)


def voltage_violation(vm):
    vm = np.asarray(vm)
    return float(np.sum(np.maximum(0.0, V_MIN - vm) + np.maximum(0.0, vm - V_MAX)))


def check_constraints(plan, network, solution):
    """Voltage band, total kvar against total load kvar, and bus range 2..L_max.

    Violations are returned as data; nothing here raises.
    """
    net = network.network if hasattr(network, "network") else network
    vviol = voltage_violation(np.abs(solution.voltages)) if solution is not None else 0.0
    cviol = max(0.0, plan.total_kvar - net.total_q_load)
    lmax = net.max_bus
    loc_ok = all(2 <= b <= lmax for b in plan.buses)
    return ConstraintReport(vviol, cviol, loc_ok)


def penalize(raw_cost, report, weights, converged=True):
    if not report.location_valid:
        return math.inf
    if converged and report.voltage_violation == 0 and report.capsize_violation == 0:
        return raw_cost
    if not math.isfinite(raw_cost):
        raw_cost = 0.0
    vv = report.voltage_violation if math.isfinite(report.voltage_violation) else 0.0
    cost = (raw_cost
            + weights.penalty_voltage * vv
            + weights.penalty_capsize * report.capsize_violation)
    if not converged:
        cost += DIVERGENCE_PENALTY
    return cost


def evaluate_plan(network, plan, weights, settings=None):
    """Solve the load flow for ``plan`` and return ``(penalized cost, solution, report)``."""
    plan = plan.merged()
    report = check_constraints(plan, network, None)
    if not report.location_valid:
        return math.inf, None, report
    sol = solve_loadflow(network, plan, settings)
    report = check_constraints(plan, network, sol)
    if not sol.converged:
        return penalize(math.nan, report, weights, converged=False), sol, report
    return penalize(fitness(sol, plan, weights), report, weights), sol, report
