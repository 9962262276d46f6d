"""Flat ``key = value`` scenario files. Units are part of the key names."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from capcsa.csa import CsaConfig
from capcsa.loadflow import SolverSettings
from capcsa.network import data_path, read_network, to_per_unit
from capcsa.objective import ObjectiveWeights
from capcsa.pso import PsoConfig
from capcsa.search import plan_bounds

SCENARIO_DIR_ENV = "CAPCSA_SCENARIO_DIR"


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    branch_file: str
    load_file: str = ""
    name: str = "scenario"
    base_kv: float = 11.0
    base_mva: float = 1.0
    tolerance_pu: float = 1e-6
    max_iterations: int = 100
    p_cost_per_kw: float = 0.0036
    q_cost_per_kvar: float = 0.0036
    cap_cost_per_kvar: float = 0.00025
    penalty_voltage_per_pu: float = 100.0
    penalty_capsize_per_kvar: float = 1.0
    optimizer: str = "csa"
    seed: int = 0
    n_capacitors: int = 1
    size_max_kvar: float = -1.0  # negative: total load kvar
    n_agents: int = 20
    max_iter: int = 100
    csa_fl: float = 2.0
    csa_ap: float = 0.1
    pso_w: float = 0.729
    pso_c1: float = 1.494
    pso_c2: float = 1.494
    pso_vmax_frac: float = 0.2
    workers: int = 1
    _network_cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        for f in (self.branch_file, self.load_file):
            if f and not Path(f).is_file():
                raise ScenarioError(f"file not found: {f}")
        if self.optimizer not in ("csa", "pso"):
            raise ScenarioError(f"optimizer must be csa or pso, got {self.optimizer!r}")
        if self.n_capacitors < 1:
            raise ScenarioError("n_capacitors must be >= 1")
        try:
            self.solver_settings()
            self.weights()
            self.csa_config()
            self.pso_config()
        except ValueError as exc:
            raise ScenarioError(str(exc)) from None
        if self.base_kv <= 0 or self.base_mva <= 0:
            raise ScenarioError("base_kv and base_mva must be positive")

    @classmethod
    def from_file(cls, path):
        path = Path(path)
        fields = {f.name: f.type for f in cls.__dataclass_fields__.values() if not f.name.startswith("_")}
        kw = {}
        for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = (s.strip() for s in line.partition("="))
            if not sep:
                raise ScenarioError(f"{path}:{lineno}: expected key = value")
            if key not in fields:
                raise ScenarioError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                kw[key] = {"int": int, "float": float}.get(fields[key], str)(value)
            except ValueError:
                raise ScenarioError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
        for key in ("branch_file", "load_file"):
            if kw.get(key):
                kw[key] = str((path.parent / kw[key]).resolve())
        if "branch_file" not in kw:
            raise ScenarioError(f"{path}: branch_file is required")
        return cls(**kw)

    def with_overrides(self, **kw):
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw) if kw else self

    def to_dict(self):
        d = asdict(self)
        d.pop("_network_cache")
        return d

    def network(self):
        if "pu" not in self._network_cache:
            net = read_network(self.branch_file, self.load_file or None, self.base_kv, self.base_mva)
            self._network_cache["pu"] = to_per_unit(net)
        return self._network_cache["pu"]

    def solver_settings(self):
        return SolverSettings(self.tolerance_pu, self.max_iterations)

    def weights(self):
        return ObjectiveWeights(self.p_cost_per_kw, self.q_cost_per_kvar, self.cap_cost_per_kvar,
                                self.penalty_voltage_per_pu, self.penalty_capsize_per_kvar)

    def bounds(self):
        smax = None if self.size_max_kvar < 0 else self.size_max_kvar
        return plan_bounds(self.network(), self.n_capacitors, smax)

    def csa_config(self, bounds=None):
        return CsaConfig(n_crows=self.n_agents, max_iter=self.max_iter, fl=self.csa_fl,
                         ap=self.csa_ap, seed=self.seed, bounds=bounds, workers=self.workers)

    def pso_config(self, bounds=None):
        vmax = None if bounds is None else self.pso_vmax_frac * (bounds[:, 1] - bounds[:, 0])
        return PsoConfig(n_particles=self.n_agents, max_iter=self.max_iter, w=self.pso_w,
                         c1=self.pso_c1, c2=self.pso_c2, v_max=vmax, seed=self.seed,
                         bounds=bounds, workers=self.workers)


def resolve_scenario_path(name):
    """Path as given, else under ``$CAPCSA_SCENARIO_DIR``, else the bundled scenarios."""
    p = Path(name)
    if p.is_file():
        return p
    for base in (os.environ.get(SCENARIO_DIR_ENV), data_path("scenarios")):
        if not base:
            continue
        for cand in (Path(base) / name, Path(base) / f"{name}.cfg"):
            if cand.is_file():
                return cand
    raise ScenarioError(f"scenario not found: {name}")


def load_scenario(name="ieee33_11kv"):
    return Scenario.from_file(resolve_scenario_path(name))
