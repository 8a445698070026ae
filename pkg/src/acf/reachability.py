"""Invariant subspaces as connected components of local charge-preserving moves.

For k >= 2 every permutation of a string is reachable with swaps, so the
graph lives on letter-count compositions: two compositions are adjacent when
some pair of strings realizing them differ in at most k positions and the
total charges agree.  k = 1 has no swaps and is handled on strings.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from sympy.utilities.iterables import multiset_permutations

from .errors import InvalidGeneratorError, ReachabilityError, StructuralError
from .groups import AbelianGroup, QuditRep, total_charge
from .sectors import SectorTable, composition_of, multinomial


def move_size(c: Sequence[int], c2: Sequence[int]) -> int:
    """Fewest positions to rewrite to turn composition c into c2."""
    return sum(max(b - a, 0) for a, b in zip(c, c2))


def hamming(s: Sequence[int], t: Sequence[int]) -> int:
    return sum(a != b for a, b in zip(s, t))


def strings_of_composition(comp: Sequence[int]) -> list[tuple[int, ...]]:
    letters = [r for r, cnt in enumerate(comp) for _ in range(cnt)]
    return [tuple(p) for p in multiset_permutations(letters)]


def basis_index(s: Sequence[int], d: int) -> int:
    idx = 0
    for letter in s:
        idx = idx * d + letter
    return idx


def index_to_string(idx: int, n: int, d: int) -> tuple[int, ...]:
    out = [0] * n
    for i in range(n - 1, -1, -1):
        idx, out[i] = divmod(idx, d)
    return tuple(out)


@dataclass(frozen=True)
class Component:
    charge: tuple
    alpha: int
    dim: int
    compositions: tuple = ()
    strings: tuple = ()  # filled explicitly only for k = 1

    @property
    def key(self) -> tuple:
        return (self.charge, self.alpha)

    def basis_strings(self) -> list[tuple[int, ...]]:
        """Member strings in lexicographic order (the block basis order)."""
        if self.strings:
            return list(self.strings)
        out = []
        for comp in self.compositions:
            out.extend(strings_of_composition(comp))
        return sorted(out)


@dataclass
class ComponentTable:
    table: SectorTable
    k: int
    components: list = field(default_factory=list)
    _by_comp: dict = field(default_factory=dict, repr=False)
    _by_string: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.table.n

    @property
    def d(self) -> int:
        return self.table.rep.d

    @property
    def string_level(self) -> bool:
        return self.k < 2

    def index_of(self, s: Sequence[int]) -> int:
        s = tuple(s)
        if len(s) != self.n or any(not 0 <= x < self.d for x in s):
            raise StructuralError(f"{s} is not a valid string for n={self.n}, d={self.d}")
        if self.string_level:
            return self._by_string[s]
        return self._by_comp[composition_of(s, self.d)]

    def component_of(self, s: Sequence[int]) -> Component:
        return self.components[self.index_of(s)]

    def lookup(self, charge, alpha: int) -> Component:
        for comp in self.components:
            if comp.charge == tuple(charge) and comp.alpha == alpha:
                return comp
        raise KeyError((tuple(charge), alpha))

    def in_sector(self, charge) -> list:
        return [c for c in self.components if c.charge == tuple(charge)]


def components(table: SectorTable, k: int) -> ComponentTable:
    if k < 1:
        raise StructuralError(f"k must be >= 1, got {k}")
    ct = ComponentTable(table=table, k=k)
    if k == 1:
        _string_components(ct)
        return ct
    for mu in table.charges:
        comps = table.sector(mu).compositions
        groups = _bfs_groups(comps, lambda a, b: move_size(a, b) <= k)
        groups.sort(key=lambda grp: min(_min_string(c) for c in grp))
        for alpha, grp in enumerate(groups):
            grp = tuple(sorted(grp))
            comp = Component(mu, alpha, sum(multinomial(c) for c in grp), grp)
            idx = len(ct.components)
            ct.components.append(comp)
            for c in grp:
                ct._by_comp[c] = idx
    return ct


def _min_string(comp: Sequence[int]) -> tuple:
    return tuple(r for r, cnt in enumerate(comp) for _ in range(cnt))


def _bfs_groups(nodes: Sequence, adjacent) -> list[list]:
    seen: set = set()
    groups = []
    for start in nodes:
        if start in seen:
            continue
        seen.add(start)
        group = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in nodes:
                if v not in seen and adjacent(u, v):
                    seen.add(v)
                    group.append(v)
                    queue.append(v)
        groups.append(group)
    return groups


def _string_components(ct: ComponentTable) -> None:
    rep, g, n = ct.table.rep, ct.table.group, ct.table.n
    for mu in ct.table.charges:
        members = []
        for comp in ct.table.sector(mu).compositions:
            members.extend(strings_of_composition(comp))
        members.sort()
        groups = _bfs_groups(members, lambda a, b: hamming(a, b) <= ct.k)
        groups.sort(key=min)
        for alpha, grp in enumerate(groups):
            grp = tuple(sorted(grp))
            idx = len(ct.components)
            ct.components.append(Component(mu, alpha, len(grp), (), grp))
            for s in grp:
                ct._by_string[s] = idx


def string_components(rep: QuditRep, g: AbelianGroup, n: int, k: int) -> list[frozenset]:
    """Brute-force oracle: components of the string graph over all d^n strings.

    Edges join strings of equal total charge at Hamming distance <= k.
    Independent of the composition-level construction.
    """
    d = rep.d
    strings = list(itertools.product(range(d), repeat=n))
    charge = {s: total_charge(s, rep, g) for s in strings}
    parent = {s: s for s in strings}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in strings:
        for size in range(1, min(k, n) + 1):
            for pos in itertools.combinations(range(n), size):
                for repl in itertools.product(range(d), repeat=size):
                    t = list(s)
                    for p, v in zip(pos, repl):
                        t[p] = v
                    t = tuple(t)
                    if t != s and charge[t] == charge[s]:
                        a, b = find(s), find(t)
                        if a != b:
                            parent[a] = b
    groups: dict = {}
    for s in strings:
        groups.setdefault(find(s), set()).add(s)
    return [frozenset(v) for v in groups.values()]


def is_semi_universal(ct: ComponentTable) -> bool:
    if ct.k < 2:
        raise StructuralError(
            "semi-universality verdicts need k >= 2; with k = 1 there are no swap moves"
        )
    return len(ct.components) == len(ct.table.entries)


def commutant_dim(ct: ComponentTable) -> int:
    return len(ct.components)


@dataclass(frozen=True)
class Path:
    waypoints: tuple

    def __len__(self):
        return len(self.waypoints)

    def validate(self, rep: QuditRep, g: AbelianGroup, k: int) -> None:
        mu = total_charge(self.waypoints[0], rep, g)
        for a, b in zip(self.waypoints, self.waypoints[1:]):
            if total_charge(b, rep, g) != mu:
                raise ReachabilityError(f"waypoint {b} leaves the charge sector {mu}")
            if hamming(a, b) > k:
                raise ReachabilityError(f"step {a} -> {b} changes more than {k} positions")


def find_path(r: Sequence[int], r2: Sequence[int], ct: ComponentTable) -> Path:
    r, r2 = tuple(r), tuple(r2)
    i, j = ct.index_of(r), ct.index_of(r2)
    if i != j:
        a, b = ct.components[i], ct.components[j]
        raise ReachabilityError(
            f"{r} lies in component {a.key} but {r2} lies in component {b.key}"
        )
    if r == r2:
        return Path((r,))
    if ct.string_level:
        return Path(tuple(_bfs_path(ct.components[i].strings, r, r2,
                                    lambda a, b: hamming(a, b) <= ct.k)))
    comps = sorted(ct.components[i].compositions)
    d = ct.d
    comp_path = _bfs_path(
        comps, composition_of(r, d), composition_of(r2, d),
        lambda a, b: move_size(a, b) <= ct.k,
    )
    waypoints = [r]
    cur = list(r)
    for nxt in comp_path[1:]:
        cur = _rewrite(cur, composition_of(cur, d), nxt)
        waypoints.append(tuple(cur))
    # same composition now; align positions with transpositions
    for pos in range(len(cur)):
        if cur[pos] == r2[pos]:
            continue
        swap = next(q for q in range(pos + 1, len(cur))
                    if cur[q] == r2[pos] and cur[q] != r2[q])
        cur[pos], cur[swap] = cur[swap], cur[pos]
        waypoints.append(tuple(cur))
    return Path(tuple(waypoints))


def _rewrite(cur: list, have: Sequence[int], want: Sequence[int]) -> list:
    """Edit the lowest-index positions carrying surplus letters."""
    out = list(cur)
    surplus = {r: have[r] - want[r] for r in range(len(have)) if have[r] > want[r]}
    deficit = [r for r in range(len(have)) for _ in range(max(want[r] - have[r], 0))]
    positions = []
    for pos, letter in enumerate(out):
        if surplus.get(letter, 0) > 0:
            surplus[letter] -= 1
            positions.append(pos)
    for pos, letter in zip(positions, deficit):
        out[pos] = letter
    return out


def _bfs_path(nodes: Sequence, start, goal, adjacent) -> list:
    ordered = sorted(nodes)
    parent = {start: None}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        if u == goal:
            break
        for v in ordered:
            if v not in parent and adjacent(u, v):
                parent[v] = u
                queue.append(v)
    if goal not in parent:
        raise ReachabilityError(f"no path from {start} to {goal}")
    out = [goal]
    while parent[out[-1]] is not None:
        out.append(parent[out[-1]])
    return out[::-1]


# -- redistribution generators ---------------------------------------------

def validate_hredist(hredist, rep: QuditRep, g: AbelianGroup, k: int) -> list:
    gens = []
    for t, t2 in hredist:
        t, t2 = tuple(t), tuple(t2)
        if len(t) != len(t2) or not 1 <= len(t) <= k:
            raise InvalidGeneratorError(
                f"generator X({t};{t2}) must act on equal-length strings of length <= {k}"
            )
        if t == t2:
            raise InvalidGeneratorError(f"generator X({t};{t2}) is diagonal")
        if total_charge(t, rep, g) != total_charge(t2, rep, g):
            raise InvalidGeneratorError(f"generator X({t};{t2}) changes the total charge")
        gens.append((t, t2))
    return gens


def generator_moves(s: Sequence[int], gens) -> list:
    """All (support, t, t', result) obtained by one embedded generator."""
    n = len(s)
    out = []
    for t, t2 in gens:
        for support in itertools.permutations(range(n), len(t)):
            local = tuple(s[p] for p in support)
            for a, b in ((t, t2), (t2, t)):
                if local == a:
                    res = list(s)
                    for p, v in zip(support, b):
                        res[p] = v
                    out.append((support, a, b, tuple(res)))
    return out


def check_hredist_transitive(hredist, rep: QuditRep, g: AbelianGroup, k: int) -> bool:
    """Do the generators connect every pair of equal-charge k-letter strings?"""
    gens = validate_hredist(hredist, rep, g, k)
    strings = list(itertools.product(range(rep.d), repeat=k))
    seen: dict = {}
    label = 0
    for s in strings:
        if s in seen:
            continue
        seen[s] = label
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for *_, v in generator_moves(u, gens):
                if v not in seen:
                    seen[v] = label
                    queue.append(v)
        label += 1
    by_charge: dict = {}
    for s in strings:
        by_charge.setdefault(total_charge(s, rep, g), set()).add(seen[s])
    return all(len(labels) == 1 for labels in by_charge.values())


def hredist_path(r: Sequence[int], r2: Sequence[int], gens) -> list:
    """Shortest sequence of embedded generator moves from r to r2.

    Returns a list of (support, t, t', result) steps.  Breadth-first over
    strings, so only meant for dense-scale n.
    """
    r, r2 = tuple(r), tuple(r2)
    parent = {r: None}
    queue = deque([r])
    while queue:
        u = queue.popleft()
        if u == r2:
            break
        for move in generator_moves(u, gens):
            v = move[3]
            if v not in parent:
                parent[v] = (u, move)
                queue.append(v)
    if r2 not in parent:
        raise ReachabilityError(f"generators do not connect {r} to {r2}")
    steps = []
    cur = r2
    while parent[cur] is not None:
        prev, move = parent[cur]
        steps.append(move)
        cur = prev
    return steps[::-1]
