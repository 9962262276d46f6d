"""Independent load-flow oracles used to check the sweep solver.

Nothing here imports from ``capcsa``; inputs are raw arrays in per-unit.
"""

import numpy as np


def build_ybus(nb, branches):
    """branches: iterable of (i, j, z) with 0-based bus indices and complex z."""
    Y = np.zeros((nb, nb), dtype=complex)
    for i, j, z in branches:
        y = 1.0 / z
        Y[i, i] += y
        Y[j, j] += y
        Y[i, j] -= y
        Y[j, i] -= y
    return Y


def newton_raphson(nb, branches, s_load, tol=1e-12, max_iter=50):
    """Polar Newton-Raphson with bus 0 as slack at 1.0 p.u.

    s_load: complex per-unit demand at each bus (positive = consumption).
    Returns complex voltages.
    """
    Y = build_ybus(nb, branches)
    s_spec = -np.asarray(s_load, dtype=complex)
    th = np.zeros(nb)
    vm = np.ones(nb)
    pq = np.arange(1, nb)
    for _ in range(max_iter):
        V = vm * np.exp(1j * th)
        s_calc = V * np.conj(Y @ V)
        mis = (s_spec - s_calc)[pq]
        f = np.concatenate([mis.real, mis.imag])
        if np.max(np.abs(f)) < tol:
            return V
        # dS/dtheta and dS/d|V|
        Ibus = Y @ V
        dS_dth = 1j * np.diag(V) @ np.conj(np.diag(Ibus) - Y @ np.diag(V))
        dS_dvm = np.diag(V) @ np.conj(Y @ np.diag(V / vm)) + np.diag(V / vm) @ np.conj(np.diag(Ibus))
        J = np.block([
            [dS_dth.real[np.ix_(pq, pq)], dS_dvm.real[np.ix_(pq, pq)]],
            [dS_dth.imag[np.ix_(pq, pq)], dS_dvm.imag[np.ix_(pq, pq)]],
        ])
        dx = np.linalg.solve(J, f)
        th[pq] += dx[: len(pq)]
        vm[pq] += dx[len(pq):]
    raise RuntimeError("newton_raphson did not converge")


def fixed_point(nb, branches, s_load, tol=1e-13, max_iter=10000):
    """Brute-force repeated substitution V = V0 - Zred @ conj(S / V).

    Uses the reduced nodal impedance matrix (inverse of Ybus without the slack
    row/column), i.e. the exact nodal equations with no tree traversal.
    """
    Y = build_ybus(nb, branches)
    Zred = np.linalg.inv(Y[1:, 1:])
    s = np.asarray(s_load, dtype=complex)[1:]
    # no-load solution with slack at 1.0 is the flat profile
    V = np.ones(nb - 1, dtype=complex)
    for _ in range(max_iter):
        V_new = 1.0 - Zred @ np.conj(s / V)
        if np.max(np.abs(V_new - V)) < tol:
            return np.concatenate([[1.0 + 0j], V_new])
        V = V_new
    raise RuntimeError("fixed_point did not converge")


def branch_loss_kw(branches, V, base_mva):
    """Series-branch losses |V_i - V_j|^2 / conj(z), in kW / kvar."""
    out = []
    for i, j, z in branches:
        I = (V[i] - V[j]) / z
        s = abs(I) ** 2 * z * base_mva * 1000.0
        out.append((s.real, s.imag))
    return np.array(out)


def load_ieee33_raw(data_dir, base_kv, base_mva=1.0):
    """Read the shipped CSVs with numpy only; returns (nb, branches, s_load)."""
    br = np.loadtxt(f"{data_dir}/ieee33_branches.csv", delimiter=",")
    ld = np.loadtxt(f"{data_dir}/ieee33_loads.csv", delimiter=",")
    zbase = base_kv ** 2 / base_mva
    nb = int(max(br[:, 0].max(), br[:, 1].max()))
    branches = [(int(a) - 1, int(b) - 1, complex(r, x) / zbase) for a, b, r, x in br]
    s = np.zeros(nb, dtype=complex)
    for bus, p, q in ld:
        s[int(bus) - 1] += complex(p, q) / (1000.0 * base_mva)
    return nb, branches, s
