"""Abelian groups, their charges, and diagonal qudit representations.

A group is a product of cyclic factors ``Z_m`` (modulus ``m >= 2``) and
``U(1)`` factors (modulus ``0``).  Irreps of such a group are labelled by
integer vectors; coordinate ``i`` is taken mod ``m_i`` for cyclic factors and
is an unbounded integer for ``U(1)`` factors.  Charges are plain tuples kept
in canonical (reduced) form so equality is tuple equality.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import StructuralError

Charge = tuple  # tuple[int, ...] in canonical form


@dataclass(frozen=True)
class AbelianGroup:
    moduli: tuple[int, ...]

    def __post_init__(self):
        moduli = tuple(int(m) for m in self.moduli)
        for m in moduli:
            if m < 0 or m == 1:
                raise StructuralError(f"modulus must be 0 (U(1)) or >= 2, got {m}")
        object.__setattr__(self, "moduli", moduli)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def is_finite(self) -> bool:
        return all(m >= 2 for m in self.moduli)

    @property
    def is_connected(self) -> bool:
        return all(m == 0 for m in self.moduli)

    @property
    def order(self) -> int | None:
        """``|G|`` for finite groups, ``None`` when a U(1) factor is present."""
        if not self.is_finite:
            return None
        return math.prod(self.moduli)

    def zero(self) -> Charge:
        return (0,) * self.rank

    def reduce(self, components: Iterable[int]) -> Charge:
        comps = tuple(int(c) for c in components)
        if len(comps) != self.rank:
            raise StructuralError(
                f"charge {comps} has length {len(comps)}, group has rank {self.rank}"
            )
        return tuple(c % m if m else c for c, m in zip(comps, self.moduli))

    def is_canonical(self, charge: Sequence[int]) -> bool:
        return len(charge) == self.rank and tuple(charge) == self.reduce(charge)

    def elements(self) -> Iterator[tuple[int, ...]]:
        """Enumerate the elements of a finite group as integer vectors."""
        if not self.is_finite:
            raise StructuralError("cannot enumerate a group with a U(1) factor")
        return itertools.product(*(range(m) for m in self.moduli))


def u1(count: int = 1) -> AbelianGroup:
    return AbelianGroup((0,) * count)


def cyclic(*orders: int) -> AbelianGroup:
    return AbelianGroup(tuple(orders))


def charge_add(a: Sequence[int], b: Sequence[int], g: AbelianGroup) -> Charge:
    if len(a) != g.rank or len(b) != g.rank:
        raise StructuralError(
            f"charges of lengths {len(a)} and {len(b)} do not match group rank {g.rank}"
        )
    return g.reduce(x + y for x, y in zip(a, b))


def charge_neg(a: Sequence[int], g: AbelianGroup) -> Charge:
    return g.reduce(-x for x in a)


@dataclass(frozen=True)
class QuditRep:
    """A diagonal representation on one qudit: a charge per basis letter."""

    d: int
    letter_charges: tuple[Charge, ...]

    def __post_init__(self):
        charges = tuple(tuple(int(x) for x in c) for c in self.letter_charges)
        if self.d < 1:
            raise StructuralError(f"local dimension must be positive, got {self.d}")
        if len(charges) != self.d:
            raise StructuralError(
                f"expected {self.d} letter charges, got {len(charges)}"
            )
        if len({len(c) for c in charges}) > 1:
            raise StructuralError("letter charges have inconsistent lengths")
        object.__setattr__(self, "letter_charges", charges)

    def validate(self, g: AbelianGroup) -> "QuditRep":
        for r, c in enumerate(self.letter_charges):
            if not g.is_canonical(c):
                raise StructuralError(
                    f"letter {r} charge {c} is not canonical for moduli {g.moduli}"
                )
        return self

    def charge(self, letter: int) -> Charge:
        if not 0 <= letter < self.d:
            raise StructuralError(f"letter {letter} out of range for d={self.d}")
        return self.letter_charges[letter]


def make_rep(g: AbelianGroup, letter_charges: Sequence[Sequence[int]]) -> QuditRep:
    """Build a rep, reducing each letter charge into canonical form."""
    charges = tuple(g.reduce(c) for c in letter_charges)
    return QuditRep(len(charges), charges)


def total_charge(s: Sequence[int], rep: QuditRep, g: AbelianGroup) -> Charge:
    acc = [0] * g.rank
    for letter in s:
        c = rep.charge(letter)
        for i, x in enumerate(c):
            acc[i] += x
    return g.reduce(acc)


def composition_charge(counts: Sequence[int], rep: QuditRep, g: AbelianGroup) -> Charge:
    """Total charge of any string whose letter counts are ``counts``."""
    acc = [0] * g.rank
    for letter, cnt in enumerate(counts):
        if cnt:
            for i, x in enumerate(rep.letter_charges[letter]):
                acc[i] += cnt * x
    return g.reduce(acc)


def irreps_set(rep: QuditRep, g: AbelianGroup, k: int) -> frozenset:
    """Charges carried by k qudits, by k-fold set convolution."""
    if k < 1:
        raise StructuralError(f"k must be >= 1, got {k}")
    letters = set(rep.letter_charges)
    current = set(letters)
    for _ in range(k - 1):
        current = {charge_add(a, b, g) for a in current for b in letters}
    return frozenset(current)


def irreps_count(rep: QuditRep, g: AbelianGroup, k: int) -> int:
    return len(irreps_set(rep, g, k))


def min_compression_length(rep: QuditRep, g: AbelianGroup, n: int) -> int:
    """Smallest l whose charge set already matches that of n qudits.

    The counts are non-decreasing in l, and once two consecutive counts
    agree they agree forever, so the scan stops at the first plateau.
    """
    if n < 1:
        raise StructuralError(f"n must be >= 1, got {n}")
    if g.rank == 0:
        return 1
    rep = normalize_rep(rep, g)
    letters = set(rep.letter_charges)
    current = set(letters)
    l = 1
    while l < n:
        nxt = {charge_add(a, b, g) for a in current for b in letters}
        # normalized charge sets are nested, so equal sets mean a plateau
        if nxt == current:
            break
        current = nxt
        l += 1
    return l


def normalize_rep(rep: QuditRep, g: AbelianGroup) -> QuditRep:
    """Shift all letter charges so letter 0 carries the zero charge."""
    shift = charge_neg(rep.letter_charges[0], g)
    return QuditRep(rep.d, tuple(charge_add(c, shift, g) for c in rep.letter_charges))


def character_value(mu: Sequence[int], gelem: Sequence[float], g: AbelianGroup) -> complex:
    """Value of the character ``f_mu`` at a group element.

    Cyclic coordinates of ``gelem`` are integers ``a`` (phase
    ``exp(2 pi i mu a / m)``); U(1) coordinates are angles ``theta``
    (phase ``exp(i mu theta)``).
    """
    if len(mu) != g.rank or len(gelem) != g.rank:
        raise StructuralError("charge/element length does not match group rank")
    phase = 0.0
    for m_i, mu_i, a_i in zip(g.moduli, mu, gelem):
        if m_i:
            phase += 2 * math.pi * ((mu_i * int(a_i)) % m_i) / m_i
        else:
            phase += mu_i * float(a_i)
    return cmath.exp(1j * phase)


def rep_trace(rep: QuditRep, g: AbelianGroup, gelem: Sequence[float]) -> complex:
    """``r(g) = Tr u(g)`` for the single-qudit representation."""
    return sum(character_value(c, gelem, g) for c in rep.letter_charges)


def charge_sort_key(c: Charge):
    return tuple(c)
