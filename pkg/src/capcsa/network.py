"""Radial feeder data: parsing, topology checks and per-unit conversion."""

from __future__ import annotations

import csv
import hashlib
import io
from collections import deque
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np


class NetworkError(ValueError):
    """Malformed or invalid feeder data."""


class ParseError(NetworkError):
    def __init__(self, source, line, message):
        self.source = source
        self.line = line
        super().__init__(f"{source}:{line}: {message}")


class TopologyError(NetworkError):
    pass


@dataclass(frozen=True)
class Bus:
    id: int
    p_load: float = 0.0  # kW
    q_load: float = 0.0  # kvar
    is_slack: bool = False


@dataclass(frozen=True)
class Branch:
    from_bus: int
    to_bus: int
    r: float  # ohm
    x: float  # ohm

    def __post_init__(self):
        if self.from_bus == self.to_bus:
            raise NetworkError(f"branch {self.from_bus}-{self.to_bus} is a self-loop")
        if self.r < 0 or self.x < 0 or (self.r == 0 and self.x == 0):
            raise NetworkError(
                f"branch {self.from_bus}-{self.to_bus}: need r >= 0, x >= 0, not both zero"
            )

    @property
    def key(self):
        return frozenset((self.from_bus, self.to_bus))

    @property
    def label(self):
        return f"{self.from_bus}-{self.to_bus}"


@dataclass(frozen=True)
class Network:
    """Radial feeder in physical units.

    ``parent`` and ``levels`` are empty until :func:`validate_radial` has run.
    After validation every branch is oriented parent -> child and branches are
    ordered by receiving bus id, so branch ``k`` feeds bus ``k + 2`` when the
    slack is bus 1.
    """

    buses: tuple[Bus, ...]
    branches: tuple[Branch, ...]
    base_kv: float
    base_mva: float
    parent: dict[int, int] = field(default_factory=dict, compare=False)
    levels: tuple[tuple[int, ...], ...] = ()

    @property
    def n_buses(self):
        return len(self.buses)

    @property
    def slack(self):
        return next(b.id for b in self.buses if b.is_slack)

    @property
    def max_bus(self):
        return max(b.id for b in self.buses)

    @property
    def total_p_load(self):
        return sum(b.p_load for b in self.buses)

    @property
    def total_q_load(self):
        return sum(b.q_load for b in self.buses)

    @property
    def is_validated(self):
        return bool(self.levels)

    def canonical(self):
        """Deterministic text form, used for equality checks and fingerprints."""
        out = io.StringIO()
        out.write(f"base_kv={self.base_kv!r},base_mva={self.base_mva!r}\n")
        for b in sorted(self.buses, key=lambda b: b.id):
            out.write(f"bus,{b.id},{b.p_load!r},{b.q_load!r},{int(b.is_slack)}\n")
        for br in sorted(self.branches, key=lambda br: (min(br.from_bus, br.to_bus), max(br.from_bus, br.to_bus))):
            out.write(f"branch,{br.from_bus},{br.to_bus},{br.r!r},{br.x!r}\n")
        return out.getvalue()

    def fingerprint(self):
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


def _read_rows(text, ncols, source):
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        fields = next(csv.reader([line]))
        if len(fields) != ncols:
            raise ParseError(source, lineno, f"expected {ncols} columns, got {len(fields)}")
        try:
            ids = [int(f) for f in fields[:ncols - 2]]
            vals = [float(f) for f in fields[ncols - 2:]]
        except ValueError:
            raise ParseError(source, lineno, f"non-numeric field in {line!r}") from None
        rows.append((lineno, ids, vals))
    return rows


def parse_network(branch_table, load_table, base_kv, base_mva=1.0, slack_bus=1):
    """Build a :class:`Network` from the two headerless CSV tables.

    ``branch_table`` rows are ``from_bus,to_bus,r_ohm,x_ohm``; ``load_table``
    rows are ``bus,p_kw,q_kvar``. Buses absent from the load table carry no
    load. Topology is not checked here, see :func:`validate_radial`.
    """
    if base_kv <= 0 or base_mva <= 0:
        raise NetworkError("base_kv and base_mva must be positive")

    branches = []
    seen = {}
    for lineno, (i, j), (r, x) in _read_rows(branch_table, 4, "branches"):
        try:
            br = Branch(i, j, r, x)
        except NetworkError as exc:
            raise ParseError("branches", lineno, str(exc)) from None
        if br.key in seen:
            raise NetworkError(f"duplicate branch {i}-{j} (lines {seen[br.key]} and {lineno})")
        seen[br.key] = lineno
        branches.append(br)

    ids = {slack_bus}
    for br in branches:
        ids.update((br.from_bus, br.to_bus))
    nb = max(ids)
    if min(ids) < 1 or len(ids) != nb:
        missing = sorted(set(range(1, nb + 1)) - ids)
        raise NetworkError(f"bus ids must be contiguous 1..{nb}; missing {missing}")

    loads = {}
    for lineno, (bus,), (p, q) in _read_rows(load_table, 3, "loads"):
        if bus not in ids:
            raise ParseError("loads", lineno, f"unknown bus {bus}")
        if bus in loads:
            raise ParseError("loads", lineno, f"second load row for bus {bus}")
        if p < 0 or q < 0:
            raise ParseError("loads", lineno, "loads must be non-negative")
        if bus == slack_bus and (p or q):
            raise ParseError("loads", lineno, "slack bus cannot carry load")
        loads[bus] = (p, q)

    buses = tuple(
        Bus(k, *loads.get(k, (0.0, 0.0)), is_slack=(k == slack_bus)) for k in range(1, nb + 1)
    )
    return Network(buses, tuple(branches), float(base_kv), float(base_mva))


def validate_radial(network):
    """Check that branches form a tree rooted at the slack; return it oriented.

    Raises :class:`TopologyError` naming the first branch that closes a loop,
    or the first bus that cannot be reached from the slack.
    """
    nb = network.n_buses
    # union-find for cycle detection in input order
    root = list(range(nb + 1))

    def find(a):
        while root[a] != a:
            root[a] = root[root[a]]
            a = root[a]
        return a

    adj = {b.id: [] for b in network.buses}
    for br in network.branches:
        a, b = find(br.from_bus), find(br.to_bus)
        if a == b:
            raise TopologyError(f"branch {br.label} closes a loop")
        root[a] = b
        adj[br.from_bus].append((br.to_bus, br))
        adj[br.to_bus].append((br.from_bus, br))

    slack = network.slack
    parent = {}
    depth = {slack: 0}
    oriented = {}
    queue = deque([slack])
    while queue:
        u = queue.popleft()
        for v, br in sorted(adj[u], key=lambda t: t[0]):
            if v in depth:
                continue
            depth[v] = depth[u] + 1
            parent[v] = u
            oriented[v] = br if br.from_bus == u else Branch(u, v, br.r, br.x)
            queue.append(v)

    unreached = sorted(set(adj) - set(depth))
    if unreached:
        raise TopologyError(f"bus {unreached[0]} is not connected to slack bus {slack}")

    nlev = max(depth.values()) + 1
    levels = tuple(
        tuple(sorted(k for k, d in depth.items() if d == lev)) for lev in range(nlev)
    )
    branches = tuple(oriented[k] for k in sorted(oriented))
    return Network(network.buses, branches, network.base_kv, network.base_mva,
                   parent=dict(sorted(parent.items())), levels=levels)


@dataclass(frozen=True, eq=False)
class PerUnitNetwork:
    """Solver-ready arrays on the (base_kv, base_mva) system.

    Bus arrays are indexed by ``bus_id - 1``. Branch ``k`` connects
    ``from_idx[k]`` (parent) to ``to_idx[k]``; ``branch_of[i]`` is the index of
    the branch feeding bus ``i`` (-1 for the slack).
    """

    network: Network
    r: np.ndarray
    x: np.ndarray
    p: np.ndarray
    q: np.ndarray
    from_idx: np.ndarray
    to_idx: np.ndarray
    branch_of: np.ndarray
    levels: tuple[np.ndarray, ...]
    slack_idx: int
    v_slack: complex = 1.0 + 0.0j

    @property
    def z(self):
        return self.r + 1j * self.x

    @property
    def s_load(self):
        return self.p + 1j * self.q

    @property
    def z_base(self):
        return self.network.base_kv ** 2 / self.network.base_mva

    @property
    def s_base_kva(self):
        return 1000.0 * self.network.base_mva

    @property
    def n_buses(self):
        return len(self.p)

    def to_physical(self):
        """Inverse of :func:`to_per_unit`."""
        net = self.network
        zb, sb = self.z_base, self.s_base_kva
        buses = tuple(
            Bus(b.id, float(self.p[b.id - 1] * sb), float(self.q[b.id - 1] * sb), b.is_slack)
            for b in net.buses
        )
        branches = tuple(
            Branch(br.from_bus, br.to_bus, float(self.r[k] * zb), float(self.x[k] * zb))
            for k, br in enumerate(net.branches)
        )
        return Network(buses, branches, net.base_kv, net.base_mva, dict(net.parent), net.levels)


def to_per_unit(network):
    if not network.is_validated:
        network = validate_radial(network)
    zb = network.base_kv ** 2 / network.base_mva
    sb = 1000.0 * network.base_mva
    nb = network.n_buses
    r = np.array([br.r for br in network.branches]) / zb
    x = np.array([br.x for br in network.branches]) / zb
    p = np.array([b.p_load for b in network.buses]) / sb
    q = np.array([b.q_load for b in network.buses]) / sb
    from_idx = np.array([br.from_bus - 1 for br in network.branches], dtype=int)
    to_idx = np.array([br.to_bus - 1 for br in network.branches], dtype=int)
    branch_of = np.full(nb, -1, dtype=int)
    branch_of[to_idx] = np.arange(len(to_idx))
    levels = tuple(np.array(lev, dtype=int) - 1 for lev in network.levels)
    for a in (r, x, p, q, from_idx, to_idx, branch_of, *levels):
        a.flags.writeable = False
    return PerUnitNetwork(network, r, x, p, q, from_idx, to_idx, branch_of, levels,
                          slack_idx=network.slack - 1)


def read_network(branch_file, load_file, base_kv, base_mva=1.0):
    """Parse and validate a feeder from files."""
    branch_text = Path(branch_file).read_text(encoding="utf-8")
    load_text = Path(load_file).read_text(encoding="utf-8") if load_file else ""
    return validate_radial(parse_network(branch_text, load_text, base_kv, base_mva))


def data_path(name):
    return Path(str(resources.files("capcsa") / "data" / name))


def ieee33(base_kv=11.0, base_mva=1.0):
    """The shipped 33-bus, 32-branch test feeder (3715 kW / 2300 kvar)."""
    return read_network(data_path("ieee33_branches.csv"), data_path("ieee33_loads.csv"),
                        base_kv, base_mva)
