import numpy as np
import pytest

from acf.groups import AbelianGroup, cyclic, make_rep, u1

U1 = u1()
Z2 = cyclic(2)
Z3 = cyclic(3)
TRIVIAL = AbelianGroup(())


def qubits(g):
    """Letter 0 neutral, letter 1 carries the unit charge."""
    if g.rank == 0:
        return make_rep(g, [[], []])
    return make_rep(g, [[0] * g.rank, [1] * g.rank])


U1Q, Z2Q, Z3Q, TRIVQ = qubits(U1), qubits(Z2), qubits(Z3), qubits(TRIVIAL)

# (name, group, rep, n) with d^n <= 256, shared by oracle and monotonicity suites
TEST_MATRIX = [
    ("u1", U1, U1Q, 3),
    ("u1", U1, U1Q, 4),
    ("u1", U1, U1Q, 5),
    ("u1", U1, U1Q, 6),
    ("z2", Z2, Z2Q, 3),
    ("z2", Z2, Z2Q, 4),
    ("z3", Z3, Z3Q, 4),
    ("z3", Z3, Z3Q, 5),
    ("z3", Z3, Z3Q, 6),
    ("triv", TRIVIAL, TRIVQ, 3),
    ("u1-qutrit", U1, make_rep(U1, [[0], [1], [2]]), 3),
    ("z2xz2", cyclic(2, 2), make_rep(cyclic(2, 2), [[0, 0], [1, 0], [0, 1], [1, 1]]), 3),
    ("z2xu1", AbelianGroup((2, 0)), make_rep(AbelianGroup((2, 0)), [[0, 0], [1, 1], [1, 0]]), 4),
]


def matrix_id(entry):
    return f"{entry[0]}-n{entry[3]}"


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20260)
