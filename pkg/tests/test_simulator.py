import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm
from scipy.stats import unitary_group

from acf.circuit import Circuit, GlobalPhase, LetterPhase, LocalRot, PairControl, wrap_angle
from acf.errors import InvalidTargetError, ResourceError, StructuralError
from acf.reachability import basis_index, components
from acf.sectors import enumerate_sectors
from acf.simulator import (
    block_phase_distance,
    check_invariance,
    circuit_unitary,
    gate_matrix,
    is_unitary,
    unitary_hash,
)
from conftest import U1, U1Q, Z3, Z3Q


def two_level(n, d, s, s2, axis):
    D = d ** n
    G = np.zeros((D, D), dtype=complex)
    i, j = basis_index(s, d), basis_index(s2, d)
    if axis == "X":
        G[i, j] = G[j, i] = 1
    elif axis == "Y":
        G[i, j], G[j, i] = 1j, -1j
    else:
        G[i, i], G[j, j] = 1, -1
    return G


def test_wrap_angle():
    assert wrap_angle(math.pi) == math.pi
    assert wrap_angle(-math.pi) == math.pi
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)


def test_global_phase():
    assert np.allclose(gate_matrix(GlobalPhase(0.4), 2, 2), np.exp(0.4j) * np.eye(4))


def test_pair_control_involution():
    C = gate_matrix(PairControl(0, 1, 2, 1), 3, 2)
    assert np.allclose(C @ C, np.eye(8))
    assert np.allclose(C, C.conj().T)


def test_local_rot_half_turn():
    U = gate_matrix(LocalRot((0, 1), (0, 1), (1, 0), math.pi / 2), 2, 2)
    block = U[np.ix_([1, 2], [1, 2])]
    assert np.allclose(block, [[0, 1j], [1j, 0]])
    assert U[0, 0] == pytest.approx(1) and U[3, 3] == pytest.approx(1)


@pytest.mark.parametrize("axis", ["X", "Y"])
def test_local_rot_is_exponential(axis):
    g = LocalRot((2, 0), (1, 0), (0, 1), 0.37, axis)
    # support (2, 0): qudit 2 carries the first letter; qudit 1 is a spectator
    G = sum(two_level(3, 2, (0, m, 1), (1, m, 0), axis) for m in (0, 1))
    assert np.allclose(gate_matrix(g, 3, 2), expm(0.37j * G))


def test_local_rot_validation():
    with pytest.raises(StructuralError):
        LocalRot((0, 1), (0, 1), (0, 1), 0.1)
    with pytest.raises(StructuralError):
        LocalRot((0, 0), (0, 1), (1, 0), 0.1)
    with pytest.raises(StructuralError):
        LocalRot((0, 1), (0, 1), (1, 0), 0.1, "Z")


def test_gate_index_out_of_range():
    with pytest.raises(IndexError):
        gate_matrix(LetterPhase(3, 1, 0.2), 3, 2)


gates = st.one_of(
    st.builds(GlobalPhase, st.floats(-4, 4)),
    st.builds(LetterPhase, st.integers(0, 2), st.integers(0, 2), st.floats(-4, 4)),
    st.builds(lambda a, b, ra, rb: PairControl(a, ra, (a + b) % 3, rb),
              st.integers(0, 2), st.integers(1, 2), st.integers(0, 2), st.integers(0, 2)),
    st.builds(lambda q, t, axis: LocalRot((q, (q + 1) % 3), (0, 1), (1, 0), t, axis),
              st.integers(0, 2), st.floats(-4, 4), st.sampled_from(["X", "Y"])),
)


@settings(max_examples=40, deadline=None)
@given(st.lists(gates, max_size=8))
def test_circuit_times_inverse_is_identity(gs):
    c = Circuit(3, 3, gs)
    for g in gs:
        assert is_unitary(gate_matrix(g, 3, 3), 1e-12)
    U = circuit_unitary(c)
    assert np.allclose(U @ circuit_unitary(c.inverse()), np.eye(27), atol=1e-10)


def test_empty_circuit_and_gate_pair():
    assert np.allclose(circuit_unitary(Circuit(2, 2)), np.eye(4))
    g = LocalRot((0, 1), (0, 1), (1, 0), 0.8, "Y")
    assert np.allclose(circuit_unitary(Circuit(2, 2, [g, g.inverse()])), np.eye(4), atol=1e-12)


def test_later_gates_multiply_on_the_left():
    a = LetterPhase(0, 1, 0.3)
    b = LocalRot((0, 1), (0, 1), (1, 0), 0.5)
    U = circuit_unitary(Circuit(2, 2, [a, b]))
    assert np.allclose(U, gate_matrix(b, 2, 2) @ gate_matrix(a, 2, 2))


def test_check_invariance_examples():
    assert check_invariance(np.eye(8), U1Q, U1)
    flip = np.kron(np.array([[0, 1], [1, 0]]), np.eye(4))
    assert not check_invariance(flip, U1Q, U1)
    assert check_invariance(gate_matrix(LocalRot((0, 2), (0, 1), (1, 0), 0.9), 3, 2), U1Q, U1)


def test_dense_cap(monkeypatch):
    with pytest.raises(ResourceError):
        circuit_unitary(Circuit(13, 2))
    monkeypatch.setenv("ACF_DENSE_CAP", "16")
    with pytest.raises(ResourceError):
        circuit_unitary(Circuit(5, 2))
    assert circuit_unitary(Circuit(4, 2)).shape == (16, 16)


def random_block_unitary(ct, rng):
    U = np.zeros((ct.d ** ct.n,) * 2, dtype=complex)
    for comp in ct.components:
        idx = [basis_index(s, ct.d) for s in comp.basis_strings()]
        U[np.ix_(idx, idx)] = unitary_group.rvs(comp.dim, random_state=rng) if comp.dim > 1 \
            else np.exp(1j * rng.uniform(-3, 3))
    return U


def test_block_phase_distance_examples(rng):
    ct = components(enumerate_sectors(Z3Q, Z3, 4), 2)
    U = random_block_unitary(ct, rng)
    dist, phases = block_phase_distance(U, U, ct)
    assert dist < 1e-12 and all(abs(p) < 1e-12 for p in phases.values())
    V = U.copy()
    comp = ct.components[1]
    idx = [basis_index(s, ct.d) for s in comp.basis_strings()]
    V[np.ix_(idx, idx)] *= np.exp(-0.6j)
    dist, phases = block_phase_distance(U, V, ct)
    assert dist < 1e-12
    assert phases[comp.key] == pytest.approx(0.6)


def test_block_phase_distance_gauge_invariant(rng):
    ct = components(enumerate_sectors(U1Q, U1, 3), 2)
    U, V = random_block_unitary(ct, rng), random_block_unitary(ct, rng)
    d0, _ = block_phase_distance(U, V, ct)
    G = np.diag(np.exp(1j * rng.uniform(-3, 3, size=8)))
    # a phase per component, constant on each block
    for comp in ct.components:
        idx = [basis_index(s, ct.d) for s in comp.basis_strings()]
        G[idx, idx] = G[idx[0], idx[0]]
    d1, _ = block_phase_distance(G @ U, V, ct)
    d2, _ = block_phase_distance(U, V @ G, ct)
    assert d0 == pytest.approx(d1, abs=1e-9) and d0 == pytest.approx(d2, abs=1e-9)


def test_block_phase_distance_zero_trace_fallback():
    ct = components(enumerate_sectors(U1Q, U1, 2), 2)
    U = np.eye(4, dtype=complex)
    V = np.eye(4, dtype=complex)
    V[1, 1] = -1  # Tr(V_b^dag U_b) = 0 on the weight-1 block
    dist, phases = block_phase_distance(U, V, ct)
    # min over phi of ||diag(1,1) - e^{i phi} diag(1,-1)|| is sqrt(2) at phi = +-pi/2
    assert dist == pytest.approx(math.sqrt(2), abs=1e-8)
    assert abs(abs(phases[((1,), 0)]) - math.pi / 2) < 1e-6


def test_block_phase_distance_leak():
    ct = components(enumerate_sectors(U1Q, U1, 2), 2)
    flip = np.kron(np.array([[0, 1], [1, 0]]), np.eye(2))
    with pytest.raises(InvalidTargetError, match="off-block"):
        block_phase_distance(flip, np.eye(4), ct)


def test_unitary_hash_stable():
    U = gate_matrix(LocalRot((0, 1), (0, 1), (1, 0), 0.3), 2, 2)
    assert unitary_hash(U) == unitary_hash(U.copy())
    assert unitary_hash(U) != unitary_hash(np.eye(4))
