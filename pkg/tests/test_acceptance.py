"""Acceptance criteria, one test each.

Every test records a single ``PASS criterion N: ...`` or ``FAIL criterion N: ...``
line; the lines are echoed in order in the terminal summary.
"""

import contextlib
import itertools
import math
import time

import numpy as np
import pytest
from scipy.linalg import expm

import conftest
from acf import io
from acf.circuit import LocalRot
from acf.cli import analyze_report, random_target
from acf.compiler import BlockTarget, compile_target, synth_diagonal_with_ancilla, \
    synth_pair_rotation, verify_gate_family
from acf.errors import PhaseObstructionError
from acf.groups import irreps_count
from acf.oracle import klocal_invariant_basis, lie_closure_dim, verify_commutant
from acf.reachability import components, is_semi_universal, string_components
from acf.sectors import dim_full_symmetric_group, dim_gap_lower_bound, enumerate_sectors, \
    phase_constraint_rank
from acf.simulator import ancilla_action, block_phase_distance, check_invariance, \
    circuit_unitary, gate_matrix
from conftest import TEST_MATRIX, TRIVIAL, TRIVQ, U1, U1Q, Z2, Z2Q, Z3, Z3Q


class Criterion:
    def __init__(self, number: int):
        self.number = number
        self.notes: list[str] = []
        self.failures: list[str] = []

    def check(self, ok, message: str) -> None:
        if not ok:
            self.failures.append(message)

    def note(self, message: str) -> None:
        self.notes.append(message)


@contextlib.contextmanager
def criterion(number: int):
    c = Criterion(number)
    start = time.perf_counter()
    try:
        yield c
    except Exception as exc:  # an exception is a failure of the criterion, not of the harness
        c.failures.append(f"{type(exc).__name__}: {exc}")
    elapsed = time.perf_counter() - start
    status = "FAIL" if c.failures else "PASS"
    detail = "; ".join(c.failures or c.notes)
    line = f"{status} criterion {number}: {detail} [{elapsed:.2f}s]"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert not c.failures, line


def spec(g, rep, n, k):
    return io.ProblemSpec(g, rep, n, k)


def test_criterion_1_u1_semi_universal():
    with criterion(1) as c:
        for n in range(3, 9):
            t0 = time.perf_counter()
            rep = analyze_report(spec(U1, U1Q, n, 2))
            dt = time.perf_counter() - t0
            c.check(rep["semi_universal"] is True, f"n={n} not semi-universal")
            c.check(rep["commutant_dim"] == n + 1, f"n={n} commutant {rep['commutant_dim']}")
            c.check(dt < 1.0, f"n={n} took {dt:.2f}s")
        c.note("n=3..8 semi_universal, commutant_dim=n+1, each under 1 s")


def test_criterion_2_u1_dimension_formula():
    with criterion(2) as c:
        t0 = time.perf_counter()
        results = []
        for n, k in [(3, 2), (4, 2), (4, 3)]:
            closure = lie_closure_dim(klocal_invariant_basis(U1Q, U1, n, k))
            full = dim_full_symmetric_group(enumerate_sectors(U1Q, U1, n))
            c.check(closure == full - (n - k), f"n={n} k={k}: closure {closure}, full {full}")
            results.append(f"n={n} k={k}: {closure}")
        c.check(results[0].endswith(": 19"), "n=3 k=2 closure is not 19")
        dt = time.perf_counter() - t0
        c.check(dt < 60, f"took {dt:.1f}s")
        c.note(", ".join(results) + " (= dim_full - (n-k), dim_full(4)=70)")


def test_criterion_3_zp_threshold():
    with criterion(3) as c:
        for n in (4, 5):
            table = enumerate_sectors(Z3Q, Z3, n)
            for k, want in ((2, False), (3, True)):
                ct = components(table, k)
                c.check(is_semi_universal(ct) is want, f"n={n} k={k} semi_universal != {want}")
                brute = set(string_components(Z3Q, Z3, n, k))
                ours = {frozenset(comp.basis_strings()) for comp in ct.components}
                c.check(brute == ours, f"n={n} k={k} partition differs from string BFS")
                c.note(f"n={n} k={k}: {len(ct.components)} components")


def test_criterion_4_odd_even_dichotomy():
    with criterion(4) as c:
        r3 = phase_constraint_rank(Z3Q, Z3, 4, 3)
        i3 = irreps_count(Z3Q, Z3, 4)
        r2 = phase_constraint_rank(Z2Q, Z2, 3, 2)
        i2 = irreps_count(Z2Q, Z2, 3)
        c.check(r3 == i3 == 3, f"Z3 rank {r3}, irreps {i3}")
        c.check(r2 == 1 and i2 == 2, f"Z2 rank {r2}, irreps {i2}")
        c.note(f"Z3 n=4 k=3 rank {r3} = irreps {i3}; Z2 n=3 k=2 rank {r2} < {i2}")


def test_criterion_5_commutant_matches_components():
    with criterion(5) as c:
        t0 = time.perf_counter()
        count = 0
        for name, g, rep, n in TEST_MATRIX:
            if rep.d ** n > 256:
                continue
            table = enumerate_sectors(rep, g, n)
            for k in range(1, n + 1):
                r = verify_commutant(components(table, k), klocal_invariant_basis(rep, g, n, k))
                c.check(r.ok, f"{name} n={n} k={k}: oracle {r.dim} vs {r.expected} components")
                count += 1
        dt = time.perf_counter() - t0
        c.check(dt < 120, f"took {dt:.1f}s")
        c.note(f"{count} (spec, k) pairs agree")


def _gate_checks(circ, rep, g, k, cache):
    for gate in circ.gates:
        if len(gate.support) > k:
            return f"{gate} acts on {len(gate.support)} qudits"
        key = repr(gate)
        if key not in cache:
            cache[key] = check_invariance(gate_matrix(gate, circ.n, circ.d), rep, g)
        if not cache[key]:
            return f"{gate} breaks the symmetry"
    return None


def test_criterion_6_compiler_soundness():
    with criterion(6) as c:
        t0 = time.perf_counter()
        for g, rep, n, k in [(U1, U1Q, 3, 2), (Z2, Z2Q, 3, 2), (Z3, Z3Q, 4, 3)]:
            ct = components(enumerate_sectors(rep, g, n), k)
            worst, gates, cache = 0.0, 0, {}
            for seed in range(100):
                target = random_target(ct, seed)
                circ = compile_target(target, ct).circuit
                dist, _ = block_phase_distance(circuit_unitary(circ), target.to_dense(ct), ct)
                worst = max(worst, dist)
                bad = _gate_checks(circ, rep, g, k, cache)
                c.check(bad is None, f"{g.moduli} n={n} seed {seed}: {bad}")
                gates += len(circ.gates)
            c.check(worst <= 1e-7, f"{g.moduli} n={n}: distance {worst:.2e}")
            c.note(f"moduli={list(g.moduli)} n={n} k={k}: max dist {worst:.1e}, {gates} gates")
        dt = time.perf_counter() - t0
        c.check(dt < 600, f"took {dt:.1f}s")


def test_criterion_7_controlled_square_identity():
    with criterion(7) as c:
        rng = np.random.default_rng(7)
        X = np.array([[0, 1], [1, 0]])
        P0, P1 = np.diag([1, 0]), np.diag([0, 1])
        worst = 0.0
        for theta in rng.uniform(-np.pi, np.pi, size=20):
            circ = synth_pair_rotation((1, 0), (1, 1), "X", 2 * theta, k=1, rep=TRIVQ, g=TRIVIAL)
            c.check(len(circ.gates) == 4, f"{len(circ.gates)} gates")
            c.check(sum(isinstance(gt, LocalRot) for gt in circ.gates) == 2, "expected two rotations")
            R = expm(1j * theta * X)
            want = np.kron(P0, np.eye(2)) + np.kron(P1, R @ R)
            worst = max(worst, float(np.abs(circuit_unitary(circ) - want).max()))
        c.check(worst <= 1e-10, f"max deviation {worst:.2e}")
        c.note(f"20 angles, max deviation {worst:.1e}")


def test_criterion_8_ancilla_lemma():
    with criterion(8) as c:
        rng = np.random.default_rng(8)
        strings = list(itertools.product(range(2), repeat=3))
        worst = 0.0
        for _ in range(50):
            phases = dict(zip(strings, rng.uniform(-np.pi, np.pi, size=8)))
            circ = synth_diagonal_with_ancilla(phases, U1Q, U1, n=3, k=2)
            c.check(circ.n == 4 and circ.max_locality() <= 2, "not 2-local on 4 qubits")
            got = ancilla_action(circuit_unitary(circ), 3, 2)
            want = np.diag(np.exp(1j * np.array([phases[s] for s in strings])))
            worst = max(worst, float(np.linalg.norm(got - want, 2)))
        c.check(worst <= 1e-7, f"diagonal distance {worst:.2e}")

        # exp(i theta Pi_mu) on the weight-1 sector: det e^{3 i theta} != 1
        ct = components(enumerate_sectors(U1Q, U1, 3), 2)
        theta = 0.7
        proj = np.diag([1.0 if sum(s) == 1 else 0.0 for s in strings])
        U = expm(1j * theta * proj)
        target = BlockTarget.from_dense(U, ct)
        with pytest.raises(PhaseObstructionError):
            compile_target(target, ct, strict=True)
        res = compile_target(target, ct, ancilla=True)
        c.check(res.circuit.max_locality() <= 2, "ancilla circuit not 2-local")
        d = float(np.linalg.norm(ancilla_action(circuit_unitary(res.circuit), 3, 2) - U, 2))
        c.check(d <= 1e-7, f"exp(i theta Pi) distance {d:.2e}")
        c.note(f"50 maps, max dist {worst:.1e}; exp(i theta Pi) strict rejected, ancilla dist {d:.1e}")


def test_criterion_9_restricted_gate_family():
    with criterion(9) as c:
        hredist = [((0, 1), (1, 0)), ((0, 0), (1, 1))]
        ct = components(enumerate_sectors(Z2Q, Z2, 3), 2)
        target = random_target(ct, 9)
        circ = compile_target(target, ct, strict=True, hredist=hredist).circuit
        report = verify_gate_family(circ, hredist, strict=True, k=2, rep=Z2Q, g=Z2)
        c.check(report.ok, f"offender {report.offender}: {report.reason}")
        dist, _ = block_phase_distance(circuit_unitary(circ), target.to_dense(ct), ct)
        c.check(dist <= 1e-7, f"distance {dist:.2e}")
        c.note(f"{len(circ.gates)} gates in the family, distance {dist:.1e}")


def test_criterion_10_monotonicity():
    with criterion(10) as c:
        for name, g, rep, n in TEST_MATRIX:
            table = enumerate_sectors(rep, g, n)
            prev = None
            for k in range(1, n + 1):
                cur = [frozenset(comp.basis_strings()) for comp in components(table, k).components]
                if prev is not None:
                    coarse = all(any(p <= q for q in cur) for p in prev)
                    c.check(coarse, f"{name} n={n}: k={k} does not coarsen k={k - 1}")
                prev = cur
            counts = [irreps_count(rep, g, m) for m in range(1, n + 1)]
            c.check(counts == sorted(counts), f"{name}: irreps counts {counts}")
            c.check(dim_gap_lower_bound(rep, g, n, n) == 0, f"{name} n={n}: gap at k=n")
        c.note(f"{len(TEST_MATRIX)} specs: partitions coarsen, irreps non-decreasing, gap(n,n)=0")
