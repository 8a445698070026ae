"""Charge sectors of n qudits and the dimension bookkeeping built on them.

Sectors are assembled from letter-count compositions rather than strings:
every string with the same composition has the same total charge, and the
number of such strings is a multinomial coefficient.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
import sympy

from .errors import ResourceError, StructuralError
from .groups import (
    AbelianGroup,
    Charge,
    QuditRep,
    character_value,
    charge_add,
    composition_charge,
    irreps_count,
    irreps_set,
)

DEFAULT_COMPOSITION_BUDGET = 2_000_000

Composition = tuple  # tuple[int, ...] of letter counts, summing to n


def compositions(n: int, d: int) -> Iterator[Composition]:
    """All length-d tuples of non-negative integers summing to n, lex order."""
    if d == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in compositions(n - first, d - 1):
            yield (first,) + rest


def num_compositions(n: int, d: int) -> int:
    return math.comb(n + d - 1, d - 1)


def multinomial(counts: Sequence[int]) -> int:
    out = 1
    total = 0
    for c in counts:
        total += c
        out *= math.comb(total, c)
    return out


def composition_of(s: Sequence[int], d: int) -> Composition:
    counts = [0] * d
    for letter in s:
        counts[letter] += 1
    return tuple(counts)


@dataclass(frozen=True)
class Sector:
    charge: Charge
    dim: int
    compositions: tuple[Composition, ...]


@dataclass
class SectorTable:
    n: int
    rep: QuditRep
    group: AbelianGroup
    entries: dict = field(default_factory=dict)  # Charge -> Sector

    @property
    def charges(self) -> list:
        """Sector charges in canonical (sorted) order."""
        return sorted(self.entries)

    def sector(self, charge: Charge) -> Sector:
        return self.entries[tuple(charge)]

    def dims(self) -> list[int]:
        return [self.entries[c].dim for c in self.charges]

    def charge_of_composition(self, comp: Composition) -> Charge:
        return composition_charge(comp, self.rep, self.group)


def enumerate_sectors(
    rep: QuditRep,
    g: AbelianGroup,
    n: int,
    budget: int = DEFAULT_COMPOSITION_BUDGET,
) -> SectorTable:
    if n < 1:
        raise StructuralError(f"n must be >= 1, got {n}")
    rep.validate(g)
    count = num_compositions(n, rep.d)
    if count > budget:
        raise ResourceError(
            f"{count} compositions of n={n} into d={rep.d} letters exceeds budget {budget}"
        )
    grouped: dict = {}
    for comp in compositions(n, rep.d):
        mu = composition_charge(comp, rep, g)
        grouped.setdefault(mu, []).append(comp)
    table = SectorTable(n=n, rep=rep, group=g)
    for mu in sorted(grouped):
        comps = tuple(sorted(grouped[mu]))
        table.entries[mu] = Sector(mu, sum(multinomial(c) for c in comps), comps)
    return table


def dim_full_symmetric_group(table: SectorTable) -> int:
    """Real dimension of the group of all symmetric unitaries."""
    return sum(s.dim ** 2 for s in table.entries.values())


def dim_gap_lower_bound(rep: QuditRep, g: AbelianGroup, n: int, k: int) -> int:
    _check_nk(n, k)
    return irreps_count(rep, g, n) - irreps_count(rep, g, k)


def charge_counts(rep: QuditRep, g: AbelianGroup, m: int) -> dict:
    """Number of m-letter strings per total charge (coefficients of r^m)."""
    if m == 0:
        return {g.zero(): 1}
    counts: dict = {}
    for comp in compositions(m, rep.d):
        mu = composition_charge(comp, rep, g)
        counts[mu] = counts.get(mu, 0) + multinomial(comp)
    return counts


def phase_coefficient_matrix(rep: QuditRep, g: AbelianGroup, n: int, k: int):
    """Integer coefficients of ``r^(n-k) f_nu`` in the character basis.

    Rows are indexed by ``nu`` in the k-qudit charge set (sorted), columns by
    the n-qudit charge set (sorted).  Characters of distinct charges are
    linearly independent functions on the group, so the real span of the
    functions has the same dimension as the rational row space.
    """
    _check_nk(n, k)
    power = charge_counts(rep, g, n - k)
    rows_idx = sorted(irreps_set(rep, g, k))
    cols_idx = sorted(irreps_set(rep, g, n))
    col_pos = {c: j for j, c in enumerate(cols_idx)}
    rows = []
    for nu in rows_idx:
        row = [0] * len(cols_idx)
        for mu, cnt in power.items():
            row[col_pos[charge_add(mu, nu, g)]] += cnt
        rows.append(row)
    return rows, rows_idx, cols_idx


def phase_constraint_rank(rep: QuditRep, g: AbelianGroup, n: int, k: int) -> int:
    """Number of independently tunable sector phases under k-local generators."""
    rows, _, _ = phase_coefficient_matrix(rep, g, n, k)
    return int(sympy.Matrix(rows).rank())


def phase_constraint_rank_numeric(
    rep: QuditRep,
    g: AbelianGroup,
    n: int,
    k: int,
    tol: float = 1e-9,
    samples: int | None = None,
    seed: int = 0,
) -> int:
    """Floating-point cross-check: rank of the evaluated function table.

    Finite groups are evaluated on every element.  When U(1) factors are
    present the angles are sampled at random points of the torus, which
    separates the finitely many characters involved with probability one.
    """
    _check_nk(n, k)
    nus = sorted(irreps_set(rep, g, k))
    if g.is_finite:
        points = list(g.elements())
    else:
        rng = np.random.default_rng(seed)
        m = samples or 4 * irreps_count(rep, g, n) + 8
        points = [
            [int(rng.integers(mod)) if mod else float(rng.uniform(0, 2 * np.pi))
             for mod in g.moduli]
            for _ in range(m)
        ]
    table = np.empty((len(nus), len(points)), dtype=complex)
    for j, pt in enumerate(points):
        r = sum(character_value(c, pt, g) for c in rep.letter_charges)
        rk = r ** (n - k)
        for i, nu in enumerate(nus):
            table[i, j] = rk * character_value(nu, pt, g)
    stacked = np.hstack([table.real, table.imag])
    sv = np.linalg.svd(stacked, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def predicted_dim(
    rep: QuditRep, g: AbelianGroup, n: int, k: int, semi_universal: bool = True
) -> int:
    """Dimension of the k-local group implied by the phase-rank formula.

    Exact when ``semi_universal`` holds; otherwise the same number is
    returned but carries no guarantee (callers should tag it as conditional).
    """
    table = enumerate_sectors(rep, g, n)
    return (
        dim_full_symmetric_group(table)
        - irreps_count(rep, g, n)
        + phase_constraint_rank(rep, g, n, k)
    )


def has_vanishing_trace(rep: QuditRep, g: AbelianGroup, tol: float = 1e-12) -> bool | None:
    """True if ``Tr u(g0) = 0`` for some element of a finite group.

    Returns ``None`` for groups with a U(1) factor, where this is not
    decidable by enumeration.
    """
    if not g.is_finite:
        return None
    for pt in g.elements():
        r = sum(character_value(c, pt, g) for c in rep.letter_charges)
        if abs(r) < tol:
            return True
    return False


def _check_nk(n: int, k: int) -> None:
    if not 1 <= k <= n:
        raise StructuralError(f"need 1 <= k <= n, got k={k}, n={n}")
