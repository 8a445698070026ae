"""Dense verification backend.

Matrices are indexed by basis strings in lexicographic order, qudit 0 being
the most significant digit.  Everything here is exact embedding plus dense
linear algebra; it is a checker, not a fast simulator.
"""

from __future__ import annotations

import hashlib
import math
import os

import numpy as np
from scipy.optimize import minimize_scalar

from .circuit import Circuit, Gate, GlobalPhase, wrap_angle
from .errors import InvalidTargetError, ResourceError
from .groups import AbelianGroup, QuditRep
from .reachability import ComponentTable, basis_index

DEFAULT_DENSE_CAP = 4096
INVARIANCE_TOL = 1e-9


def dense_cap(cap: int | None = None) -> int:
    if cap is not None:
        return int(cap)
    env = os.environ.get("ACF_DENSE_CAP")
    return int(env) if env else DEFAULT_DENSE_CAP


def _check_cap(n: int, d: int, cap: int | None) -> int:
    size = d ** n
    limit = dense_cap(cap)
    if size > limit:
        raise ResourceError(f"dense dimension {d}^{n} = {size} exceeds cap {limit}")
    return size


def apply_local(mat: np.ndarray, op: np.ndarray, support, n: int, d: int) -> np.ndarray:
    """Left-multiply ``mat`` (d^n rows) by ``op`` acting on ``support``."""
    l = len(support)
    cols = mat.shape[1]
    t = mat.reshape((d,) * n + (cols,))
    op_t = op.reshape((d,) * (2 * l))
    out = np.tensordot(op_t, t, axes=(list(range(l, 2 * l)), list(support)))
    # tensordot puts the op's output axes first; restore qudit order
    out = np.moveaxis(out, list(range(l)), list(support))
    return out.reshape(d ** n, cols)


def gate_matrix(gate: Gate, n: int, d: int, cap: int | None = None) -> np.ndarray:
    size = _check_cap(n, d, cap)
    if isinstance(gate, GlobalPhase):
        return np.exp(1j * gate.angle) * np.eye(size, dtype=complex)
    for q in gate.support:
        if not 0 <= q < n:
            raise IndexError(f"{gate} touches qudit {q} outside 0..{n - 1}")
    return apply_local(np.eye(size, dtype=complex), gate.local_matrix(d), gate.support, n, d)


def apply_circuit(c: Circuit, mat: np.ndarray) -> np.ndarray:
    out = np.array(mat, dtype=complex, copy=True)
    for gate in c.gates:
        if isinstance(gate, GlobalPhase):
            out *= np.exp(1j * gate.angle)
        else:
            out = apply_local(out, gate.local_matrix(c.d), gate.support, c.n, c.d)
    return out


def circuit_unitary(c: Circuit, cap: int | None = None) -> np.ndarray:
    """Ordered product of the gates; later gates multiply on the left."""
    size = _check_cap(c.n, c.d, cap)
    return apply_circuit(c, np.eye(size, dtype=complex))


def string_charges(rep: QuditRep, g: AbelianGroup, n: int) -> np.ndarray:
    """Unreduced total charge of every basis string, shape (d^n, rank)."""
    letters = np.array(rep.letter_charges, dtype=np.int64).reshape(rep.d, g.rank)
    digits = np.indices((rep.d,) * n).reshape(n, -1).T
    return letters[digits].sum(axis=1)


def symmetry_generators(rep: QuditRep, g: AbelianGroup, n: int) -> list[np.ndarray]:
    """Diagonals of one generator per group coordinate.

    Cyclic factor Z_m: the global action of its generator.  U(1) factor: the
    total-charge operator.  Commuting with these is commuting with G.
    """
    charges = string_charges(rep, g, n)
    gens = []
    for i, m in enumerate(g.moduli):
        if m:
            gens.append(np.exp(2j * np.pi * (charges[:, i] % m) / m))
        else:
            gens.append(charges[:, i].astype(complex))
    return gens


def check_invariance(U: np.ndarray, rep: QuditRep, g: AbelianGroup,
                     tol: float = INVARIANCE_TOL) -> bool:
    n = round(math.log(U.shape[0], rep.d)) if rep.d > 1 else 1
    for diag in symmetry_generators(rep, g, n):
        comm = U * (diag[None, :] - diag[:, None])
        if np.max(np.abs(comm), initial=0.0) > tol:
            return False
    return True


def is_unitary(U: np.ndarray, tol: float = 1e-9) -> bool:
    return np.allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=tol, rtol=0)


def component_indices(ct: ComponentTable) -> list[np.ndarray]:
    return [np.array([basis_index(s, ct.d) for s in comp.basis_strings()])
            for comp in ct.components]


def off_block_mass(U: np.ndarray, ct: ComponentTable) -> float:
    mask = np.ones(U.shape, dtype=bool)
    for idx in component_indices(ct):
        mask[np.ix_(idx, idx)] = False
    return float(np.max(np.abs(U[mask]), initial=0.0))


def _best_phase(Ub: np.ndarray, Vb: np.ndarray) -> float:
    overlap = np.trace(Vb.conj().T @ Ub)
    if abs(overlap) > 1e-12:
        return float(np.angle(overlap))

    def dist(phi):
        return np.linalg.norm(Ub - np.exp(1j * phi) * Vb, 2)

    grid = np.linspace(-np.pi, np.pi, 64, endpoint=False)
    vals = [dist(p) for p in grid]
    best = grid[int(np.argmin(vals))]
    step = 2 * np.pi / 64
    res = minimize_scalar(dist, bounds=(best - step, best + step), method="bounded",
                          options={"xatol": 1e-12})
    return float(res.x if res.fun <= min(vals) else best)


def block_phase_distance(U: np.ndarray, V: np.ndarray, ct: ComponentTable,
                         leak_tol: float = 1e-8):
    """Worst per-component distance after optimising a phase per component.

    Returns ``(distance, phases)`` where ``phases[(charge, alpha)]`` is the
    phase phi with ``U_b ~ exp(i phi) V_b``.
    """
    for name, M in (("U", U), ("V", V)):
        leak = off_block_mass(M, ct)
        if leak > leak_tol:
            raise InvalidTargetError(
                f"{name} has off-block matrix elements up to {leak:.3e} (tolerance {leak_tol})"
            )
    worst = 0.0
    phases = {}
    for comp, idx in zip(ct.components, component_indices(ct)):
        Ub, Vb = U[np.ix_(idx, idx)], V[np.ix_(idx, idx)]
        phi = _best_phase(Ub, Vb)
        worst = max(worst, float(np.linalg.norm(Ub - np.exp(1j * phi) * Vb, 2)))
        phases[comp.key] = wrap_angle(phi)
    return worst, phases


def ancilla_action(U: np.ndarray, n: int, d: int, letter: int = 0,
                   leak_tol: float = 1e-8) -> np.ndarray:
    """Restrict an (n+1)-qudit unitary to inputs with the last qudit in ``letter``."""
    idx = np.arange(d ** n) * d + letter
    leak = np.abs(np.delete(U[:, idx], idx, axis=0)).max(initial=0.0)
    if leak > leak_tol:
        raise InvalidTargetError(f"circuit moves the ancilla out of |{letter}> ({leak:.3e})")
    return U[np.ix_(idx, idx)]


def unitary_hash(U: np.ndarray, decimals: int = 9) -> str:
    rounded = np.round(U, decimals) + (0.0 + 0.0j)
    return hashlib.sha256(np.ascontiguousarray(rounded).tobytes()).hexdigest()
