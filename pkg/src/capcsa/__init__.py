"""Radial feeder load flow and capacitor placement by crow search."""

from capcsa.csa import CsaConfig, minimize_csa, run_csa
from capcsa.loadflow import (
    LoadFlowSolution,
    SolverSettings,
    solve_loadflow,
    voltage_deviation,
    voltage_stability_index,
)
from capcsa.network import Network, ieee33, parse_network, read_network, to_per_unit, validate_radial
from capcsa.objective import ObjectiveWeights, check_constraints, evaluate_plan, fitness, penalize
from capcsa.plan import CapacitorPlan
from capcsa.pso import PsoConfig, minimize_pso, run_pso

__all__ = [
    "CapacitorPlan", "CsaConfig", "LoadFlowSolution", "Network", "ObjectiveWeights", "PsoConfig",
    "SolverSettings", "check_constraints", "evaluate_plan", "fitness", "ieee33", "minimize_csa",
    "minimize_pso", "parse_network", "penalize", "read_network", "run_csa", "run_pso",
    "solve_loadflow", "to_per_unit", "validate_radial", "voltage_deviation",
    "voltage_stability_index",
]
