import pytest
from hypothesis import strategies as st

from capcsa.network import ieee33, parse_network, to_per_unit, validate_radial

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def feeder11():
    return to_per_unit(ieee33(11.0))


@pytest.fixture(scope="session")
def feeder1266():
    return to_per_unit(ieee33(12.66))


def chain(*zs, loads=()):
    """Per-unit chain 1-2-...; ``zs`` are complex branch impedances in p.u.
    on a 1 kV / 1 MVA base (so ohm == p.u.), ``loads`` are complex kVA per bus 2..n.
    """
    branches = "\n".join(f"{k + 1},{k + 2},{z.real!r},{z.imag!r}" for k, z in enumerate(zs))
    load_rows = "\n".join(f"{k + 2},{s.real!r},{s.imag!r}" for k, s in enumerate(loads))
    return to_per_unit(validate_radial(parse_network(branches, load_rows, 1.0, 1.0)))


@st.composite
def radial_feeders(draw, max_buses=5):
    """Random trees rooted at bus 1 with 2..max_buses buses, as CSV text."""
    nb = draw(st.integers(2, max_buses))
    rows = []
    for k in range(2, nb + 1):
        parent = draw(st.integers(1, k - 1))
        r = draw(st.floats(0.001, 0.05))
        x = draw(st.floats(0.001, 0.05))
        rows.append(f"{parent},{k},{r!r},{x!r}")
    loads = []
    for k in range(2, nb + 1):
        p = draw(st.floats(0.0, 300.0))
        q = draw(st.floats(0.0, 200.0))
        loads.append(f"{k},{p!r},{q!r}")
    return "\n".join(rows), "\n".join(loads)


def record_acceptance(criterion, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
