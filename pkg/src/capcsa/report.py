"""Base / optimized runs, comparison tables and their JSON + CSV outputs."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from capcsa.csa import minimize_csa
from capcsa.loadflow import solve_loadflow, voltage_deviation, voltage_stability_index
from capcsa.network import data_path
from capcsa.objective import V_MAX, V_MIN, evaluate_plan
from capcsa.plan import CapacitorPlan
from capcsa.pso import minimize_pso
from capcsa.search import CapacitorProblem


class NonConvergenceError(RuntimeError):
    def __init__(self, case, last_delta, iterations):
        self.last_delta = last_delta
        super().__init__(f"{case}: load flow did not converge after {iterations} iterations "
                         f"(last max |dV| = {last_delta:.3e} p.u.)")


class CompareError(ValueError):
    pass


@dataclass
class CaseResult:
    voltages_pu: list
    angles_deg: list
    branches: list  # "from-to" labels
    p_loss_kw: list
    q_loss_kvar: list
    total_p_loss_kw: float
    total_q_loss_kvar: float
    vd: float
    min_vsi: float
    min_voltage: float
    min_voltage_bus: int
    violating_buses: list
    converged: bool
    iterations: int
    last_delta: float


@dataclass
class RunReport:
    case: str
    scenario: dict
    fingerprint: str
    base: CaseResult
    result: CaseResult
    plan: list = field(default_factory=list)  # [[bus, mvar], ...]
    best_cost: float = float("nan")
    feasible: bool = True
    p_loss_reduction_pct: float = 0.0
    q_loss_reduction_pct: float = 0.0
    history: list = field(default_factory=list)
    history_path: str = ""

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["base"] = CaseResult(**d["base"])
        d["result"] = CaseResult(**d["result"])
        return cls(**d)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1, allow_nan=True)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    @property
    def converged(self):
        return self.base.converged and self.result.converged


def case_result(network, solution):
    vm = solution.vm
    _, min_vsi = voltage_stability_index(network, solution)
    bad = [int(k) + 1 for k in np.flatnonzero((vm < V_MIN) | (vm > V_MAX + 1e-12))]
    return CaseResult(
        voltages_pu=vm.tolist(),
        angles_deg=np.degrees(np.angle(solution.voltages)).tolist(),
        branches=[br.label for br in network.network.branches],
        p_loss_kw=solution.p_loss_per_branch.tolist(),
        q_loss_kvar=solution.q_loss_per_branch.tolist(),
        total_p_loss_kw=solution.total_p_loss,
        total_q_loss_kvar=solution.total_q_loss,
        vd=voltage_deviation(solution),
        min_vsi=min_vsi,
        min_voltage=solution.min_voltage,
        min_voltage_bus=solution.min_voltage_bus,
        violating_buses=bad,
        converged=solution.converged,
        iterations=solution.iterations,
        last_delta=solution.last_delta,
    )


def reduction_pct(base, value):
    return 100.0 * (base - value) / base if base else 0.0


def _solve_case(scenario, plan, case):
    net = scenario.network()
    cost, sol, report = evaluate_plan(net, plan, scenario.weights(), scenario.solver_settings())
    if sol is None:
        raise ValueError(f"{case}: invalid capacitor location in {plan}")
    if not sol.converged:
        raise NonConvergenceError(case, sol.last_delta, sol.iterations)
    return cost, case_result(net, sol), report.feasible


def run_base(scenario):
    """Load flow without capacitors; buses outside 0.9-1.0 p.u. are listed."""
    cost, res, feasible = _solve_case(scenario, CapacitorPlan(), "base")
    return RunReport("base", scenario.to_dict(), scenario.network().network.fingerprint(),
                     base=res, result=res, best_cost=cost, feasible=feasible)


def run_optimized(scenario, optimizer=None, base=None):
    """Search for a plan with the scenario's optimizer and re-solve with it."""
    optimizer = optimizer or scenario.optimizer
    base = base or run_base(scenario)
    net = scenario.network()
    bounds = scenario.bounds()
    problem = CapacitorProblem(net, scenario.weights(), scenario.solver_settings(), bounds)
    if optimizer == "csa":
        opt = minimize_csa(problem, scenario.csa_config(bounds))
    elif optimizer == "pso":
        opt = minimize_pso(problem, scenario.pso_config(bounds))
    else:
        raise ValueError(f"unknown optimizer {optimizer!r}")
    plan = problem.decode(opt.best_position).merged()
    cost, res, feasible = _solve_case(scenario, plan, optimizer)
    return RunReport(
        case=optimizer,
        scenario=scenario.to_dict() | {"optimizer": optimizer},
        fingerprint=base.fingerprint,
        base=base.base,
        result=res,
        plan=[[bus, kvar / 1000.0] for bus, kvar in plan.placements],
        best_cost=cost,
        feasible=feasible,
        p_loss_reduction_pct=reduction_pct(base.base.total_p_loss_kw, res.total_p_loss_kw),
        q_loss_reduction_pct=reduction_pct(base.base.total_q_loss_kvar, res.total_q_loss_kvar),
        history=list(opt.history.best_cost_per_iteration),
    )


COLUMNS = ["case", "source", "p_loss_kw", "q_loss_kvar", "vd", "vsi", "cap_mvar", "location", "best_cost"]


def read_cited_rows(path=None):
    path = path or data_path("table1_cited.csv")
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        for r in csv.DictReader(f):
            rows.append({
                "case": r["case"],
                "source": r["provenance"],
                **{k: float(r[k]) if r[k] else None
                   for k in ("p_loss_kw", "q_loss_kvar", "vd", "vsi", "cap_mvar", "best_cost")},
                "location": r["location"] or None,
            })
    return rows


def compare_runs(reports, reference_rows=()):
    """Table-1 shaped rows: computed runs first, then cited reference rows."""
    if not reports:
        raise CompareError("nothing to compare")
    prints = {r.fingerprint for r in reports}
    if len(prints) > 1:
        raise CompareError(f"reports come from different networks: {sorted(prints)}")
    rows = []
    for r in reports:
        res = r.result
        rows.append({
            "case": r.case,
            "source": "computed",
            "p_loss_kw": res.total_p_loss_kw,
            "q_loss_kvar": res.total_q_loss_kvar,
            "vd": res.vd,
            "vsi": res.min_vsi,
            "cap_mvar": sum(m for _, m in r.plan) if r.plan else None,
            "location": " ".join(str(b) for b, _ in r.plan) or None,
            "best_cost": r.best_cost,
        })
    rows.extend(dict(row) for row in reference_rows)
    return rows


def format_table(rows):
    def fmt(v):
        if v is None:
            return "-"
        if isinstance(v, float):
            return f"{v:.4g}" if abs(v) < 10 else f"{v:.2f}"
        return str(v)

    cells = [COLUMNS] + [[fmt(r[c]) for c in COLUMNS] for r in rows]
    widths = [max(len(row[k]) for row in cells) for k in range(len(COLUMNS))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in cells)


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_report(report, out_dir):
    """Write ``<case>_report.json`` plus voltage, branch-loss and convergence CSVs."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    res = report.result
    _write_csv(out / f"{report.case}_voltage_profile.csv", ["bus", "v_pu"],
               [[k + 1, repr(v)] for k, v in enumerate(res.voltages_pu)])
    _write_csv(out / f"{report.case}_branch_losses.csv", ["branch", "p_kw", "q_kvar"],
               [[b, repr(p), repr(q)] for b, p, q in zip(res.branches, res.p_loss_kw, res.q_loss_kvar)])
    if report.history:
        hist = out / f"{report.case}_convergence.csv"
        _write_csv(hist, ["iter", "cost"], [[k, repr(c)] for k, c in enumerate(report.history)])
        report.history_path = hist.name
    (out / f"{report.case}_report.json").write_text(report.to_json(), encoding="utf-8")
    return out / f"{report.case}_report.json"


def write_comparison(rows, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "comparison.csv", COLUMNS,
               [["" if r[c] is None else r[c] for c in COLUMNS] for r in rows])
    return out / "comparison.csv"


def load_report(path):
    return RunReport.from_json(Path(path).read_text(encoding="utf-8"))


def summarize(report):
    res = report.result
    lines = [
        f"[{report.case}] P loss {res.total_p_loss_kw:.2f} kW, Q loss {res.total_q_loss_kvar:.2f} kvar, "
        f"min |V| {res.min_voltage:.4f} p.u. at bus {res.min_voltage_bus}, "
        f"VD {res.vd:.3f}, min VSI {res.min_vsi:.3f}, cost {report.best_cost:.4f}",
    ]
    if report.plan:
        plan = ", ".join(f"bus {b}: {m:.4f} Mvar" for b, m in report.plan)
        lines.append(f"  plan {plan}; reduction P {report.p_loss_reduction_pct:.2f}% "
                     f"Q {report.q_loss_reduction_pct:.2f}%")
    if res.violating_buses:
        lines.append(f"  buses outside {V_MIN}-{V_MAX} p.u.: {res.violating_buses}")
    return "\n".join(lines)


def solve_scenario(scenario, plan=None):
    """Convenience: the raw load-flow solution for a scenario."""
    return solve_loadflow(scenario.network(), plan, scenario.solver_settings())
