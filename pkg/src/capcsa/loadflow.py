"""Backward/forward sweep load flow for radial feeders."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from capcsa.plan import CapacitorPlan


class VoltageCollapseError(ArithmeticError):
    """A bus voltage reached zero during the sweeps."""


@dataclass(frozen=True)
class SolverSettings:
    tolerance: float = 1e-6  # p.u., on max |V_k - V_(k-1)|
    max_iterations: int = 100

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True, eq=False)
class LoadFlowSolution:
    voltages: np.ndarray  # complex p.u. per bus
    branch_currents: np.ndarray  # complex p.u. per branch
    p_loss_per_branch: np.ndarray  # kW
    q_loss_per_branch: np.ndarray  # kvar
    total_p_loss: float
    total_q_loss: float
    iterations: int
    converged: bool
    last_delta: float  # max |dV| of the final iteration
    s_injection: np.ndarray  # complex p.u. net demand per bus (load - capacitor)

    @property
    def vm(self):
        return np.abs(self.voltages)

    @property
    def min_voltage(self):
        return float(self.vm.min())

    @property
    def min_voltage_bus(self):
        return int(np.argmin(self.vm)) + 1

    def slack_power(self, network):
        """Complex power drawn from the slack bus, p.u."""
        root = network.from_idx == network.slack_idx
        return complex(self.voltages[network.slack_idx] * np.conj(self.branch_currents[root].sum()))


def capacitor_injection(network, plan):
    """Per-bus capacitor kvar in p.u. (a non-negative array)."""
    qc = np.zeros(network.n_buses)
    if plan is None:
        return qc
    for bus, kvar in plan.placements:
        qc[bus - 1] += kvar / network.s_base_kva
    return qc


def net_demand(network, plan=None):
    return network.p + 1j * (network.q - capacitor_injection(network, plan))


def inject_currents(network, voltages, plan=None, s=None):
    """Nodal load currents ``conj(S_i / V_i)``; capacitors enter as ``-j q_cap``."""
    if s is None:
        s = net_demand(network, plan)
    voltages = np.asarray(voltages, dtype=complex)
    if np.any(np.abs(voltages) == 0):
        raise VoltageCollapseError("zero voltage magnitude during sweep")
    return np.conj(s / voltages)


def backward_sweep(network, currents):
    """Branch currents: each branch carries its receiving-bus injection plus
    the currents of all branches leaving that bus. Leaves are processed first.
    """
    currents = np.asarray(currents, dtype=complex)
    # acc[i]: current drawn through bus i by everything at and below it
    acc = currents.copy()
    for lev in reversed(network.levels[1:]):
        np.add.at(acc, network.from_idx[network.branch_of[lev]], acc[lev])
    return acc[network.to_idx]


def forward_sweep(network, branch_currents, v_slack=1.0 + 0.0j):
    """Root-first voltage update ``V_child = V_parent - J * Z``."""
    drop = np.asarray(branch_currents, dtype=complex) * network.z
    v = np.empty(network.n_buses, dtype=complex)
    v[network.slack_idx] = v_slack
    for lev in network.levels[1:]:
        b = network.branch_of[lev]
        v[lev] = v[network.from_idx[b]] - drop[b]
    return v


def branch_losses(network, voltages, branch_currents):
    """Per-branch (p_loss kW, q_loss kvar) from sending-end flows.

    ``(P_ij^2 + Q_ij^2) / |V_i|^2`` is ``|J_ij|^2``; it is kept in the
    sending-end form so the shared factor multiplies R and X identically.
    """
    vs = voltages[network.from_idx]
    s_send = vs * np.conj(branch_currents)
    k = (s_send.real ** 2 + s_send.imag ** 2) / np.abs(vs) ** 2
    return k * network.r * network.s_base_kva, k * network.x * network.s_base_kva


def solve_loadflow(network, plan=None, settings=None):
    """Iterate inject -> backward -> forward until max |dV| < tolerance.

    Non-convergence is reported through ``converged=False``, not raised.
    A voltage collapse also yields a non-converged solution.
    """
    settings = settings or SolverSettings()
    s = net_demand(network, plan)
    v = np.full(network.n_buses, network.v_slack, dtype=complex)
    j = np.zeros(len(network.r), dtype=complex)
    converged = False
    delta = np.inf
    it = 0
    with np.errstate(all="ignore"):
        for it in range(1, settings.max_iterations + 1):
            try:
                i_inj = inject_currents(network, v, s=s)
            except VoltageCollapseError:
                break
            j = backward_sweep(network, i_inj)
            v_new = forward_sweep(network, j, network.v_slack)
            delta = float(np.max(np.abs(v_new - v)))
            v = v_new
            if not np.isfinite(delta):
                break
            if delta < settings.tolerance:
                converged = True
                break
        p_loss, q_loss = branch_losses(network, v, j)
    return LoadFlowSolution(
        voltages=v,
        branch_currents=j,
        p_loss_per_branch=p_loss,
        q_loss_per_branch=q_loss,
        total_p_loss=float(p_loss.sum()),
        total_q_loss=float(q_loss.sum()),
        iterations=it,
        converged=converged,
        last_delta=delta,
        s_injection=s,
    )


def voltage_deviation(solution):
    """Sum over buses of ``|1 - |V||`` in p.u."""
    return float(np.sum(np.abs(1.0 - solution.vm)))


def voltage_stability_index(network, solution):
    """Per-bus stability index and its minimum over receiving buses.

    For bus ``j`` fed from ``i`` through ``R + jX`` carrying receiving-end
    power ``P + jQ``::

        |V_i|^4 - 4 (P X - Q R)^2 - 4 (P R + Q X) |V_i|^2

    The slack has no feeding branch and is reported as 1.0 (not part of the
    minimum).
    """
    v = solution.voltages
    vi = np.abs(v[network.from_idx])
    s_recv = v[network.to_idx] * np.conj(solution.branch_currents)
    P, Q = s_recv.real, s_recv.imag
    R, X = network.r, network.x
    vsi_branch = vi ** 4 - 4.0 * (P * X - Q * R) ** 2 - 4.0 * (P * R + Q * X) * vi ** 2
    vsi = np.ones(network.n_buses)
    vsi[network.to_idx] = vsi_branch
    return vsi, float(vsi_branch.min())
