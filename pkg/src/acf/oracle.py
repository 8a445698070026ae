"""Brute-force linear-algebra ground truth at desk scale.

Operators are handled as real vectors ``[Re vec(A), Im vec(A)]`` so that the
Euclidean product is the real Hilbert-Schmidt product ``Re Tr(A^dag B)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solve_triangular

from .errors import ClosureError, ResourceError, StructuralError
from .groups import AbelianGroup, QuditRep, total_charge
from .reachability import ComponentTable, basis_index
from .sectors import SectorTable
from .simulator import check_invariance, string_charges

BASIS_CAP = 256
CLOSURE_CAP = 64
GRAM_TOL = 1e-9
MAX_ROUNDS = 64


@dataclass
class OperatorBasis:
    """Linearly independent k-local symmetric Hermitians (stored sparse)."""

    elements: list
    n: int
    k: int
    rep: QuditRep
    group: AbelianGroup
    supports: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.elements)

    def dense(self) -> list[np.ndarray]:
        return [e.toarray() for e in self.elements]


def _local_hermitians(rep: QuditRep, g: AbelianGroup, k: int) -> list[np.ndarray]:
    """Matrix units on k qudits, symmetrised into Hermitian pairs per charge block."""
    d = rep.d
    blocks: dict = {}
    for s in itertools.product(range(d), repeat=k):
        blocks.setdefault(total_charge(s, rep, g), []).append(basis_index(s, d))
    out = []
    dim = d ** k
    for mu in sorted(blocks):
        idx = blocks[mu]
        for a_pos, a in enumerate(idx):
            m = np.zeros((dim, dim), dtype=complex)
            m[a, a] = 1
            out.append(m)
            for b in idx[a_pos + 1:]:
                x = np.zeros((dim, dim), dtype=complex)
                x[a, b] = x[b, a] = 1
                y = np.zeros((dim, dim), dtype=complex)
                y[a, b], y[b, a] = 1j, -1j
                out.extend((x, y))
    return out


def _embed_sparse(local: np.ndarray, support, n: int, d: int) -> sp.csr_matrix:
    # permute qudits so the support comes first, then kron with identity
    rest = [q for q in range(n) if q not in support]
    big = sp.kron(sp.csr_matrix(local), sp.identity(d ** len(rest), format="csr"), format="csr")
    order = list(support) + rest
    digits = np.indices((d,) * n).reshape(n, -1)
    # index of each original basis string inside the reordered tensor product
    new_idx = np.zeros(d ** n, dtype=np.int64)
    for q in order:
        new_idx = new_idx * d + digits[q]
    return big[new_idx][:, new_idx].tocsr()


def _real_vec_sparse(m: sp.spmatrix) -> sp.csr_matrix:
    flat = sp.csr_matrix(m.reshape(1, -1))
    return sp.hstack([flat.real, flat.imag], format="csr")


def _greedy_independent(gram: np.ndarray, tol: float = GRAM_TOL, block: int = 256) -> list[int]:
    """Indices kept by an in-order pivoted Cholesky on a Gram matrix.

    Candidates are processed in blocks: one triangular solve against the
    factor so far gives each block's Schur complement, then a small in-order
    factorisation inside the block decides which members survive.
    """
    N = gram.shape[0]
    keep: list[int] = []
    L = np.zeros((0, 0))
    for start in range(0, N, block):
        idx = np.arange(start, min(N, start + block))
        S = gram[np.ix_(idx, idx)]
        if keep:
            W = solve_triangular(L, gram[np.ix_(keep, idx)], lower=True)
            S = S - W.T @ W
        else:
            W = np.zeros((0, len(idx)))
        local: list[int] = []
        Lc = np.zeros((len(idx), len(idx)))
        for j in range(len(idx)):
            w = solve_triangular(Lc[:len(local), :len(local)], S[local, j], lower=True) \
                if local else np.zeros(0)
            resid = S[j, j] - w @ w
            if resid > tol * max(gram[idx[j], idx[j]], 1.0):
                m = len(local)
                Lc[m, :m] = w
                Lc[m, m] = np.sqrt(resid)
                local.append(j)
        if not local:
            continue
        m = len(local)
        L = np.block([[L, np.zeros((L.shape[0], m))],
                      [W[:, local].T, Lc[:m, :m]]])
        keep.extend(int(idx[j]) for j in local)
    return keep


def klocal_invariant_basis(rep: QuditRep, g: AbelianGroup, n: int, k: int,
                           cap: int = BASIS_CAP) -> OperatorBasis:
    rep.validate(g)
    if not 1 <= k <= n:
        raise StructuralError(f"need 1 <= k <= n, got k={k}, n={n}")
    if rep.d ** n > cap:
        raise ResourceError(f"d^n = {rep.d ** n} exceeds oracle cap {cap}")
    local = _local_hermitians(rep, g, k)
    cands, supports = [], []
    for support in itertools.combinations(range(n), k):
        for m in local:
            cands.append(_embed_sparse(m, support, n, rep.d))
            supports.append(support)
    vecs = sp.vstack([_real_vec_sparse(c) for c in cands], format="csr")
    gram = (vecs @ vecs.T).toarray()
    keep = _greedy_independent(gram)
    return OperatorBasis([cands[i] for i in keep], n, k, rep, g, [supports[i] for i in keep])


def _to_real(mats: np.ndarray) -> np.ndarray:
    flat = mats.reshape(mats.shape[0], -1)
    return np.hstack([flat.real, flat.imag])


def _from_real(vecs: np.ndarray, D: int) -> np.ndarray:
    half = D * D
    return (vecs[:, :half] + 1j * vecs[:, half:]).reshape(-1, D, D)


def _absorb(Q: np.ndarray, cands: np.ndarray, tol: float) -> np.ndarray:
    """Append the parts of ``cands`` outside span(Q); Q has orthonormal rows."""
    norms0 = np.linalg.norm(cands, axis=1)
    R = cands[norms0 > tol]
    norms0 = norms0[norms0 > tol]
    if Q.shape[0] and R.shape[0]:
        for _ in range(2):
            R = R - (R @ Q.T) @ Q
    added = []
    # greedy in candidate order: take the first survivor, deflate the rest
    while R.shape[0]:
        rel = np.linalg.norm(R, axis=1) / norms0
        alive = rel > tol
        R, norms0 = R[alive], norms0[alive]
        if not R.shape[0]:
            break
        v = R[0] / np.linalg.norm(R[0])
        for a in added:  # re-orthogonalise the pivot for stability
            v = v - (a @ v) * a
        v = v / np.linalg.norm(v)
        added.append(v)
        R, norms0 = R[1:], norms0[1:]
        R = R - np.outer(R @ v, v)
    if not added:
        return Q
    return np.vstack([Q, np.array(added)]) if Q.shape[0] else np.array(added)


def lie_closure_dim(basis: OperatorBasis | list, cap: int = CLOSURE_CAP,
                    tol: float = GRAM_TOL, max_rounds: int = MAX_ROUNDS) -> int:
    """Real dimension of the Lie algebra generated by ``i * basis``."""
    mats = basis.dense() if isinstance(basis, OperatorBasis) else [
        m.toarray() if sp.issparse(m) else np.asarray(m, dtype=complex) for m in basis]
    if not mats:
        raise StructuralError("lie_closure_dim needs a non-empty basis")
    D = mats[0].shape[0]
    if D > cap:
        raise ResourceError(f"closure on dimension {D} exceeds cap {cap}")
    Q = _absorb(np.zeros((0, 2 * D * D)), _to_real(np.array(mats, dtype=complex)), tol)
    frontier = Q.copy()
    for _ in range(max_rounds):
        if frontier.shape[0] == 0:
            return int(Q.shape[0])
        allm = _from_real(Q, D)
        before = Q.shape[0]
        for A in _from_real(frontier, D):
            comm = 1j * (A[None] @ allm - allm @ A[None])
            Q = _absorb(Q, _to_real(comm), tol)
        frontier = Q[before:]
    raise ClosureError(f"closure did not stabilise within {max_rounds} rounds (dim {Q.shape[0]})")


def _sector_labels(rep: QuditRep, g: AbelianGroup, n: int) -> list:
    raw = string_charges(rep, g, n)
    return [g.reduce(row) for row in raw.tolist()]


def charge_vector(H: np.ndarray, table: SectorTable, tol: float = 1e-9) -> np.ndarray:
    """``(Tr(H Pi_mu))_mu`` in canonical charge order."""
    H = np.asarray(H)
    if not check_invariance(H, table.rep, table.group, tol):
        raise StructuralError("H does not commute with the symmetry")
    labels = _sector_labels(table.rep, table.group, table.n)
    diag = np.real(np.diag(H))
    pos = {mu: i for i, mu in enumerate(table.charges)}
    out = np.zeros(len(pos))
    for lab, val in zip(labels, diag):
        out[pos[lab]] += val
    return out


@dataclass
class CommutantReport:
    ok: bool
    dim: int
    expected: int
    residual: float

    def __bool__(self) -> bool:
        return self.ok


def commutant_nullity(basis: OperatorBasis, tol: float = 1e-9):
    """Dimension of {M : [M, H] = 0 for all H in basis} plus the reduced system.

    Diagonal basis elements split indices into classes; M can only couple
    indices that agree on every diagonal element, which keeps the unknown
    count near d^n instead of d^2n.
    """
    D = basis.rep.d ** basis.n
    diag_keys = [[] for _ in range(D)]
    for e in basis.elements:
        coo = e.tocoo()
        if np.all(coo.row == coo.col):
            full = np.zeros(D, dtype=complex)
            full[coo.row] = coo.data
            for i in range(D):
                diag_keys[i].append(complex(np.round(full[i], 9)))
    classes: dict = {}
    for i, key in enumerate(diag_keys):
        classes.setdefault(tuple(key), []).append(i)
    # unknown (i, j) with i, j in the same class, in column-major vec order
    cols = sorted(j * D + i for grp in classes.values() for i in grp for j in grp)
    ident = sp.identity(D, format="csr")
    rows = []
    for e in basis.elements:
        e = sp.csr_matrix(e)
        op = sp.kron(e.T, ident) - sp.kron(ident, e)
        rows.append(op.tocsc()[:, cols])
    A = sp.vstack(rows, format="csr") if rows else sp.csr_matrix((0, len(cols)))
    gram = (A.conj().T @ A).toarray()
    ev = np.linalg.eigvalsh(gram)
    scale = max(ev[-1], 1.0) if ev.size else 1.0
    nullity = int(np.sum(ev < tol * scale))
    return nullity, A, cols


def verify_commutant(ct: ComponentTable, basis: OperatorBasis, tol: float = 1e-9) -> CommutantReport:
    """Commutant dimension equals the component count and the projectors span it."""
    if ct.n != basis.n or ct.d != basis.rep.d:
        raise StructuralError("component table and basis describe different systems")
    nullity, A, cols = commutant_nullity(basis, tol)
    D = ct.d ** ct.n
    worst = 0.0
    pos = {c: i for i, c in enumerate(cols)}
    for comp in ct.components:
        x = np.zeros(len(cols), dtype=complex)
        for s in comp.basis_strings():
            i = basis_index(s, ct.d)
            key = i * D + i
            if key not in pos:
                worst = np.inf
                break
            x[pos[key]] = 1
        else:
            worst = max(worst, float(np.linalg.norm(A @ x)))
    expected = len(ct.components)
    ok = nullity == expected and worst <= 1e-8
    return CommutantReport(ok, nullity, expected, worst)
