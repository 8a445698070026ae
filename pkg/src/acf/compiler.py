"""Lower symmetric block-diagonal targets to k-local symmetric gates.

Pipeline for one invariant subspace:

1. Two-level (Givens) decomposition of the block into SU(2) factors on
   pairs of basis strings plus a unit-determinant diagonal.
2. Each SU(2) factor becomes Z-X-Z rotations on its pair; the diagonal
   becomes a chain of Z rotations on neighbouring labels.
3. A rotation on a pair (r, r') is routed along a path of moves of at most
   k changed positions.  Earlier edges enter as pi/2 Y-rotations that
   conjugate the last edge's rotation onto the endpoints.
4. A rotation on a pair at Hamming distance <= k is built from one local
   rotation on the differing qudits and the pair controls C_{a,b}, one
   control level per agreeing qudit:
   exp(i t F_{l+1}) = exp(i t F_l) C exp(-i t F_l) C.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import (
    Circuit,
    Gate,
    GlobalPhase,
    LetterPhase,
    LocalRot,
    PairControl,
    wrap_angle,
)
from .errors import InvalidTargetError, PhaseObstructionError, StructuralError
from .groups import AbelianGroup, QuditRep, total_charge
from .reachability import (
    ComponentTable,
    basis_index,
    find_path,
    hamming,
    hredist_path,
    validate_hredist,
)
from .simulator import off_block_mass, symmetry_generators

UNIT_TOL = 1e-9
ANGLE_EPS = 1e-15


# -- two-level decomposition -------------------------------------------------

def givens_decompose(block: np.ndarray, labels, tol: float = UNIT_TOL):
    """Factor a unitary into two-level SU(2) factors and a diagonal.

    Returns ``(factors, remainder)`` with ``factors`` a list of
    ``((label_i, label_j), V)`` where V is 2x2 special unitary acting on
    the ordered pair, such that ``block == F_1 @ F_2 @ ... @ diag(remainder)``
    with each F embedded on its pair.
    """
    W = np.array(block, dtype=complex, copy=True)
    m = W.shape[0]
    if W.shape != (m, m) or len(labels) != m:
        raise InvalidTargetError("block shape does not match its labels")
    if not np.allclose(W.conj().T @ W, np.eye(m), atol=tol, rtol=0):
        raise InvalidTargetError("block is not unitary")
    if len(set(map(tuple, labels))) != m:
        raise InvalidTargetError("block labels are not distinct")
    factors = []
    for j in range(m):
        for i in range(j + 1, m):
            a, b = W[j, j], W[i, j]
            if abs(b) < 1e-14:
                continue
            nu = math.hypot(abs(a), abs(b))
            G = np.array([[a.conjugate(), b.conjugate()], [-b, a]]) / nu
            W[[j, i], :] = G @ W[[j, i], :]
            factors.append(((tuple(labels[j]), tuple(labels[i])), G.conj().T))
    return factors, np.diag(W).copy()


def euler_zxz(V: np.ndarray) -> tuple[float, float, float]:
    """Angles with V = exp(i a Z) exp(i b X) exp(i c Z) for V in SU(2)."""
    p, q = V[0, 0], V[0, 1]
    beta = math.atan2(abs(q), abs(p))
    plus = float(np.angle(p)) if abs(p) > 1e-14 else 0.0
    minus = float(np.angle(q)) - math.pi / 2 if abs(q) > 1e-14 else 0.0
    return (plus + minus) / 2, beta, (plus - minus) / 2


def diagonal_chain(phases, labels) -> list:
    """Z rotations on consecutive labels reproducing a det-1 diagonal."""
    out = []
    acc = 0.0
    for i in range(len(labels) - 1):
        acc += phases[i]
        out.append(((tuple(labels[i]), tuple(labels[i + 1])), wrap_angle(acc)))
    return out


# -- pair rotations ----------------------------------------------------------

def _core_x(r, r2, theta: float, base_support=None) -> list[Gate]:
    n = len(r)
    diff = [i for i in range(n) if r[i] != r2[i]]
    b = diff[0]
    if base_support is None:
        support = tuple(diff)
    else:
        support = tuple(base_support)
        if not set(diff) <= set(support):
            raise StructuralError(f"base support {support} misses differing qudits {diff}")
    controls = [q for q in range(n) if q not in support]
    base_s = tuple(r[q] for q in support)
    base_s2 = tuple(r2[q] for q in support)
    phi = theta / 2 ** len(controls)

    def build(level: int, angle: float) -> list[Gate]:
        if level == 0:
            return [LocalRot(support, base_s, base_s2, angle, "X")]
        a = controls[level - 1]
        ctl = PairControl(a, r[a], b, r[b])
        return [ctl] + build(level - 1, -angle) + [ctl] + build(level - 1, angle)

    return build(len(controls), phi)


def synth_pair_rotation(r, r2, axis: str, theta: float, k: int,
                        rep: QuditRep | None = None, g: AbelianGroup | None = None,
                        base_support=None, d: int | None = None) -> Circuit:
    """exp(i theta G(r;r')) for strings at Hamming distance <= k."""
    r, r2 = tuple(r), tuple(r2)
    if len(r) != len(r2):
        raise StructuralError("strings differ in length")
    if r == r2:
        raise StructuralError("pair rotation needs two distinct strings")
    if rep is not None and g is not None:
        if total_charge(r, rep, g) != total_charge(r2, rep, g):
            raise InvalidTargetError(f"{r} and {r2} carry different charges")
    dist = hamming(r, r2)
    width = dist if base_support is None else len(base_support)
    if width > k:
        raise StructuralError(
            f"{r} and {r2} differ in {dist} positions > k={k}; route with synth_path_rotation"
        )
    if d is None:
        d = rep.d if rep is not None else max(r + r2) + 1
    circ = Circuit(len(r), d)
    circ.extend(_pair_gates(r, r2, axis, theta, base_support))
    return circ


def _pair_gates(r, r2, axis: str, theta: float, base_support=None) -> list[Gate]:
    if axis == "X":
        return _core_x(r, r2, theta, base_support)
    b = next(i for i in range(len(r)) if r[i] != r2[i])
    if axis == "Y":
        # Y = P X P^dag with P = exp(i pi/2 |r_b><r_b|)
        return ([LetterPhase(b, r[b], -math.pi / 2)]
                + _core_x(r, r2, theta, base_support)
                + [LetterPhase(b, r[b], math.pi / 2)])
    if axis == "Z":
        # Z = W X W^dag with W = exp(-i pi/4 Y)
        return (_pair_gates(r, r2, "Y", math.pi / 4, base_support)
                + _core_x(r, r2, theta, base_support)
                + _pair_gates(r, r2, "Y", -math.pi / 4, base_support))
    raise StructuralError(f"unknown axis {axis!r}")


def core_gate_bound(n: int, dist: int) -> int:
    return 4 * 2 ** (n - dist)


# -- long-range rotations ----------------------------------------------------

def synth_path_rotation(r, r2, axis: str, theta: float, ct: ComponentTable,
                        hredist=None) -> Circuit:
    """exp(i theta G(r;r')) for any pair inside one invariant subspace."""
    r, r2 = tuple(r), tuple(r2)
    circ = Circuit(ct.n, ct.d)
    circ.extend(_path_gates(r, r2, axis, theta, ct, hredist))
    return circ


def _route(r, r2, ct: ComponentTable, gens):
    """Waypoints and, when generators are given, the support of each edge."""
    if gens is None:
        path = find_path(r, r2, ct)
        return list(path.waypoints), [None] * (len(path) - 1)
    if ct.index_of(r) != ct.index_of(r2):
        find_path(r, r2, ct)  # raises, naming both components
    steps = hredist_path(r, r2, gens)
    waypoints = [r] + [step[3] for step in steps]
    return waypoints, [step[0] for step in steps]


def _path_gates(r, r2, axis, theta, ct, hredist) -> list[Gate]:
    if r == r2:
        raise StructuralError("path rotation needs two distinct strings")
    gens = None
    if hredist is not None:
        gens = validate_hredist(hredist, ct.table.rep, ct.table.group, ct.k)
    waypoints, supports = _route(r, r2, ct, gens)
    waypoints, supports = _drop_loops(waypoints, supports)
    for a, b, sup in zip(waypoints, waypoints[1:], supports):
        if sup is None and hamming(a, b) > ct.k:
            raise StructuralError(f"path step {a} -> {b} exceeds k={ct.k}")
    edges = list(zip(waypoints, waypoints[1:], supports))
    pre, post = [], []
    for a, b, sup in edges[:-1]:
        pre += _pair_gates(a, b, "Y", math.pi / 2, sup)
    for a, b, sup in reversed(edges[:-1]):
        post += _pair_gates(a, b, "Y", -math.pi / 2, sup)
    a, b, sup = edges[-1]
    return pre + _pair_gates(a, b, axis, theta, sup) + post


def _drop_loops(waypoints, supports):
    out_w, out_s = [waypoints[0]], []
    for w, s in zip(waypoints[1:], supports):
        if w in out_w:
            cut = out_w.index(w)
            out_w, out_s = out_w[:cut + 1], out_s[:cut]
        else:
            out_w.append(w)
            out_s.append(s)
    return out_w, out_s


# -- targets -----------------------------------------------------------------

@dataclass
class BlockTarget:
    """A symmetric target given blockwise; missing components mean identity.

    ``blocks[(charge, alpha)]`` is a unitary on that component's strings in
    lexicographic order.
    """

    blocks: dict = field(default_factory=dict)

    def determinants(self) -> dict:
        return {key: complex(np.linalg.det(B)) for key, B in self.blocks.items()}

    def validate(self, ct: ComponentTable, strict: bool = True, tol: float = UNIT_TOL):
        dims = {c.key: c.dim for c in ct.components}
        for key, B in self.blocks.items():
            if key not in dims:
                raise InvalidTargetError(f"no invariant subspace {key}")
            if B.shape != (dims[key], dims[key]):
                raise InvalidTargetError(
                    f"block {key} has shape {B.shape}, component dimension is {dims[key]}"
                )
            if not np.allclose(B.conj().T @ B, np.eye(dims[key]), atol=tol, rtol=0):
                raise InvalidTargetError(f"block {key} is not unitary")
        if strict:
            bad = {key: det for key, det in self.determinants().items()
                   if abs(det - 1) > tol}
            if bad:
                listing = ", ".join(f"{key}: det={det:.6g}" for key, det in bad.items())
                raise PhaseObstructionError(
                    "block determinants differ from 1; k-local symmetric circuits cannot "
                    f"set these relative phases (type-I constraint): {listing}",
                    bad,
                )
        return self

    def to_dense(self, ct: ComponentTable) -> np.ndarray:
        size = ct.d ** ct.n
        U = np.eye(size, dtype=complex)
        for comp in ct.components:
            if comp.key in self.blocks:
                idx = [basis_index(s, ct.d) for s in comp.basis_strings()]
                U[np.ix_(idx, idx)] = self.blocks[comp.key]
        return U

    @classmethod
    def from_dense(cls, U: np.ndarray, ct: ComponentTable, tol: float = 1e-8,
                   keep_identity: bool = False) -> "BlockTarget":
        leak = off_block_mass(U, ct)
        if leak > tol:
            raise InvalidTargetError(
                f"target mixes invariant subspaces (off-block elements up to {leak:.3e})"
            )
        blocks = {}
        for comp in ct.components:
            idx = [basis_index(s, ct.d) for s in comp.basis_strings()]
            B = U[np.ix_(idx, idx)]
            if keep_identity or not np.allclose(B, np.eye(len(idx)), atol=1e-15, rtol=0):
                blocks[comp.key] = np.array(B, dtype=complex)
        return cls(blocks)

    def split_phases(self) -> tuple["BlockTarget", dict]:
        """Factor each block as exp(i phi) * special unitary."""
        special, phases = {}, {}
        for key, B in self.blocks.items():
            phi = float(np.angle(np.linalg.det(B))) / B.shape[0]
            special[key] = B * np.exp(-1j * phi)
            phases[key] = phi
        return BlockTarget(special), phases


def _block_gates(B: np.ndarray, labels, ct: ComponentTable, hredist) -> list[Gate]:
    factors, remainder = givens_decompose(B, labels)
    gates: list[Gate] = []

    def rot(pair, axis, angle):
        angle = wrap_angle(angle)
        if abs(angle) > ANGLE_EPS:
            gates.extend(_path_gates(pair[0], pair[1], axis, angle, ct, hredist))

    for pair, angle in diagonal_chain(np.angle(remainder), labels):
        rot(pair, "Z", angle)
    for pair, V in reversed(factors):
        alpha, beta, gamma = euler_zxz(V)
        rot(pair, "Z", gamma)
        rot(pair, "X", beta)
        rot(pair, "Z", alpha)
    return gates


def synth_block_unitary(target: BlockTarget, ct: ComponentTable, k: int | None = None,
                        hredist=None) -> Circuit:
    """Compile a strict target (every block special unitary)."""
    if k is not None and k != ct.k:
        raise StructuralError(f"component table was built for k={ct.k}, not k={k}")
    if ct.k < 2:
        raise StructuralError("synthesis needs k >= 2")
    target.validate(ct, strict=True)
    circ = Circuit(ct.n, ct.d)
    for comp in ct.components:
        B = target.blocks.get(comp.key)
        if B is None or comp.dim == 1:
            continue
        circ.extend(_block_gates(B, comp.basis_strings(), ct, hredist))
    return circ


# -- diagonal unitaries with one ancilla ---------------------------------------

def synth_diagonal_with_ancilla(phases: dict, rep: QuditRep, g: AbelianGroup,
                                n: int | None = None, k: int = 2) -> Circuit:
    """Diagonal unitary on n qudits using 2-local gates and an ancilla in |0>.

    The ancilla is qudit n.  Each string r other than 0^n gets its phase
    from a Z rotation on the pair (r.0, r'.s), where r' resets the first
    nonzero letter s of r to 0; the two strings differ in two positions.
    """
    if k < 2:
        raise StructuralError("ancilla construction needs k >= 2")
    phases = {tuple(s): float(v) for s, v in phases.items()}
    if n is None:
        if not phases:
            raise StructuralError("cannot infer n from an empty phase map")
        n = len(next(iter(phases)))
    for s in phases:
        if len(s) != n or any(not 0 <= x < rep.d for x in s):
            raise StructuralError(f"{s} is not a string of {n} letters below {rep.d}")
    zero = (0,) * n
    base = phases.get(zero, 0.0)
    circ = Circuit(n + 1, rep.d)
    # strings absent from the map keep phase 0, so every string is visited
    for r in itertools.product(range(rep.d), repeat=n):
        if r == zero:
            continue
        theta = wrap_angle(phases.get(r, 0.0) - base)
        if abs(theta) <= ANGLE_EPS:
            continue
        j = next(i for i, x in enumerate(r) if x != 0)
        s = r[j]
        lifted = r + (0,)
        partner = r[:j] + (0,) + r[j + 1:] + (s,)
        circ.extend(_pair_gates(lifted, partner, "Z", theta))
    circ.append(GlobalPhase(wrap_angle(base)))
    return circ


def embed(circ: Circuit, n: int) -> Circuit:
    """The same gates on a larger register (extra qudits untouched)."""
    if n < circ.n:
        raise StructuralError("cannot embed into a smaller register")
    return Circuit(n, circ.d, list(circ.gates))


@dataclass
class CompileResult:
    circuit: Circuit
    residual_phases: dict
    ancilla: bool = False


def compile_target(target: BlockTarget, ct: ComponentTable, strict: bool = True,
                   ancilla: bool = False, hredist=None) -> CompileResult:
    """Driver: strict, lenient, or ancilla-assisted compilation.

    Strict rejects blocks whose determinant is not 1.  Lenient compiles the
    special part of every block and reports the phases left unrealized.
    With ``ancilla`` those phases are realized by the one-ancilla diagonal
    construction on n + 1 qudits.
    """
    if ancilla:
        target.validate(ct, strict=False)
        special, phases = target.split_phases()
        circ = embed(synth_block_unitary(special, ct, hredist=hredist), ct.n + 1)
        diag = {}
        for comp in ct.components:
            phi = phases.get(comp.key, 0.0)
            if abs(phi) > ANGLE_EPS:
                for s in comp.basis_strings():
                    diag[s] = phi
        tail = synth_diagonal_with_ancilla(diag, ct.table.rep, ct.table.group, n=ct.n)
        circ.extend(tail.gates)
        return CompileResult(circ, {}, ancilla=True)
    if strict:
        return CompileResult(synth_block_unitary(target, ct, hredist=hredist), {})
    target.validate(ct, strict=False)
    special, phases = target.split_phases()
    circ = synth_block_unitary(special, ct, hredist=hredist)
    residual = {key: phi for key, phi in phases.items() if abs(phi) > ANGLE_EPS}
    return CompileResult(circ, residual)


# -- gate-family audit ---------------------------------------------------------

@dataclass
class FamilyReport:
    ok: bool
    offender: Gate | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _matches_generator(gate: LocalRot, gens) -> bool:
    l = len(gate.support)
    for t, t2 in gens:
        if len(t) != l:
            continue
        for perm in itertools.permutations(range(l)):
            pt = tuple(t[p] for p in perm)
            pt2 = tuple(t2[p] for p in perm)
            if (gate.s, gate.s2) in ((pt, pt2), (pt2, pt)):
                return True
    return False


def _quarter_turn(angle: float) -> bool:
    return abs(abs(wrap_angle(angle)) - math.pi / 2) < 1e-12


def verify_gate_family(c: Circuit, hredist=(), strict: bool = True, k: int | None = None,
                       rep: QuditRep | None = None, g: AbelianGroup | None = None) -> FamilyReport:
    """Check a circuit against the three sufficient gate families.

    Strict: every gate is a quarter-turn letter phase, a pair control, or an
    X rotation whose (s, s') is a listed generator up to qudit relabelling.
    Non-strict: only k-locality and symmetry of each gate.
    """
    gens = [(tuple(t), tuple(t2)) for t, t2 in hredist]
    for gate in c.gates:
        if strict:
            if isinstance(gate, LetterPhase) and _quarter_turn(gate.angle):
                continue
            if isinstance(gate, PairControl):
                continue
            if isinstance(gate, LocalRot) and gate.axis == "X" and _matches_generator(gate, gens):
                continue
            return FamilyReport(False, gate, "not in the three gate families")
        if k is not None and len(gate.support) > k:
            return FamilyReport(False, gate, f"acts on more than {k} qudits")
        if rep is not None and g is not None and not gate_is_symmetric(gate, rep, g):
            return FamilyReport(False, gate, "does not commute with the symmetry")
    return FamilyReport(True)


def gate_is_symmetric(gate: Gate, rep: QuditRep, g: AbelianGroup, tol: float = 1e-10) -> bool:
    """Local test: the gate's matrix commutes with u(h) on its support."""
    l = len(gate.support)
    if l == 0:
        return True
    M = gate.local_matrix(rep.d)
    for diag in symmetry_generators(rep, g, l):
        if np.max(np.abs(M * (diag[None, :] - diag[:, None]))) > tol:
            return False
    return True
