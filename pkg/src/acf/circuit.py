"""The constrained instruction set and circuits built from it.

Conventions for a pair of basis strings (s, s'):

    X(s;s') = |s><s'| + |s'><s|
    Y(s;s') = i(|s><s'| - |s'><s|)
    Z(s;s') = |s><s| - |s'><s'|

so that ``(i/2)[X, Y] = Z``.  A rotation about axis G by angle theta is
``exp(i theta G)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import StructuralError
from .groups import AbelianGroup, QuditRep, total_charge


def wrap_angle(theta: float) -> float:
    """Map an angle into (-pi, pi]."""
    t = math.remainder(theta, 2 * math.pi)
    return math.pi if t == -math.pi else t


@dataclass(frozen=True)
class GlobalPhase:
    angle: float

    @property
    def support(self) -> tuple:
        return ()

    def local_matrix(self, d: int) -> np.ndarray:
        return np.array([[np.exp(1j * self.angle)]])

    def inverse(self) -> "GlobalPhase":
        return GlobalPhase(-self.angle)


@dataclass(frozen=True)
class LetterPhase:
    """exp(i angle |letter><letter|) on one qudit."""

    qudit: int
    letter: int
    angle: float

    @property
    def support(self) -> tuple:
        return (self.qudit,)

    def local_matrix(self, d: int) -> np.ndarray:
        diag = np.ones(d, dtype=complex)
        diag[self.letter] = np.exp(1j * self.angle)
        return np.diag(diag)

    def inverse(self) -> "LetterPhase":
        return LetterPhase(self.qudit, self.letter, -self.angle)


@dataclass(frozen=True)
class PairControl:
    """The Hermitian unitary 1 - 2 |ra><ra|_a (x) |rb><rb|_b."""

    a: int
    ra: int
    b: int
    rb: int

    @property
    def support(self) -> tuple:
        return (self.a, self.b)

    def local_matrix(self, d: int) -> np.ndarray:
        diag = np.ones(d * d, dtype=complex)
        diag[self.ra * d + self.rb] = -1
        return np.diag(diag)

    def inverse(self) -> "PairControl":
        return self


@dataclass(frozen=True)
class LocalRot:
    """exp(i angle G(s;s')) on an ordered qudit subset, G in {X, Y}."""

    support: tuple
    s: tuple
    s2: tuple
    angle: float
    axis: str = "X"

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(int(q) for q in self.support))
        object.__setattr__(self, "s", tuple(int(x) for x in self.s))
        object.__setattr__(self, "s2", tuple(int(x) for x in self.s2))
        if self.axis not in ("X", "Y"):
            raise StructuralError(f"LocalRot axis must be X or Y, got {self.axis!r}")
        if not (len(self.support) == len(self.s) == len(self.s2)):
            raise StructuralError("LocalRot support and strings differ in length")
        if len(set(self.support)) != len(self.support):
            raise StructuralError(f"LocalRot support {self.support} repeats a qudit")
        if self.s == self.s2:
            raise StructuralError("LocalRot needs two distinct strings")

    def local_matrix(self, d: int) -> np.ndarray:
        dim = d ** len(self.support)
        out = np.eye(dim, dtype=complex)
        i, j = _local_index(self.s, d), _local_index(self.s2, d)
        c, s = math.cos(self.angle), math.sin(self.angle)
        out[i, i] = out[j, j] = c
        if self.axis == "X":
            out[i, j] = out[j, i] = 1j * s
        else:
            out[i, j], out[j, i] = -s, s
        return out

    def inverse(self) -> "LocalRot":
        return LocalRot(self.support, self.s, self.s2, -self.angle, self.axis)


Gate = Union[GlobalPhase, LetterPhase, PairControl, LocalRot]


def _local_index(s, d: int) -> int:
    idx = 0
    for x in s:
        idx = idx * d + x
    return idx


def gate_locality(gate: Gate) -> int:
    return len(gate.support)


def validate_gate(gate: Gate, n: int, d: int, rep: QuditRep | None = None,
                  g: AbelianGroup | None = None) -> None:
    """Structural checks; charge checks too when a rep and group are given."""
    for q in gate.support:
        if not 0 <= q < n:
            raise StructuralError(f"{gate} touches qudit {q} outside 0..{n - 1}")
    if isinstance(gate, LetterPhase) and not 0 <= gate.letter < d:
        raise StructuralError(f"{gate} uses letter outside 0..{d - 1}")
    if isinstance(gate, PairControl):
        if gate.a == gate.b:
            raise StructuralError(f"{gate} controls a qudit on itself")
        if not (0 <= gate.ra < d and 0 <= gate.rb < d):
            raise StructuralError(f"{gate} uses letter outside 0..{d - 1}")
    if isinstance(gate, LocalRot):
        if any(not 0 <= x < d for x in gate.s + gate.s2):
            raise StructuralError(f"{gate} uses letter outside 0..{d - 1}")
        if rep is not None and g is not None:
            if total_charge(gate.s, rep, g) != total_charge(gate.s2, rep, g):
                raise StructuralError(f"{gate} rotates between different charges")


@dataclass
class Circuit:
    """Gates in time order: the first gate acts first."""

    n: int
    d: int
    gates: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def append(self, gate: Gate) -> None:
        self.gates.append(gate)

    def extend(self, gates) -> None:
        self.gates.extend(gates)

    def inverse(self) -> "Circuit":
        return Circuit(self.n, self.d, [g.inverse() for g in reversed(self.gates)])

    def max_locality(self) -> int:
        return max((gate_locality(g) for g in self.gates), default=0)

    def validate(self, rep: QuditRep | None = None, g: AbelianGroup | None = None) -> None:
        for gate in self.gates:
            validate_gate(gate, self.n, self.d, rep, g)
