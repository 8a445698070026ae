"""JSON formats (schema "acf-1") for problem specs, circuits and targets.

Angles are written as decimal strings (``repr`` of the float, which round
trips exactly) so reports are byte-for-byte reproducible.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, GlobalPhase, LetterPhase, LocalRot, PairControl
from .compiler import BlockTarget
from .errors import StructuralError
from .groups import AbelianGroup, QuditRep, make_rep

SCHEMA = "acf-1"


@dataclass(frozen=True)
class ProblemSpec:
    group: AbelianGroup
    rep: QuditRep
    n: int
    k: int

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "moduli": list(self.group.moduli),
            "d": self.rep.d,
            "letter_charges": [list(c) for c in self.rep.letter_charges],
            "n": self.n,
            "k": self.k,
        }


def _need(obj: dict, key: str, kind=None):
    if key not in obj:
        raise StructuralError(f"missing field {key!r}")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise StructuralError(f"field {key!r} has the wrong type")
    return val


def _check_schema(obj) -> None:
    if not isinstance(obj, dict):
        raise StructuralError("expected a JSON object")
    if obj.get("schema", SCHEMA) != SCHEMA:
        raise StructuralError(f"unsupported schema {obj.get('schema')!r}")


def spec_from_json(obj: dict) -> ProblemSpec:
    _check_schema(obj)
    g = AbelianGroup(tuple(_need(obj, "moduli", list)))
    charges = _need(obj, "letter_charges", list)
    d = _need(obj, "d", int)
    if len(charges) != d:
        raise StructuralError(f"d={d} but {len(charges)} letter charges given")
    rep = make_rep(g, charges)
    n, k = _need(obj, "n", int), _need(obj, "k", int)
    if not 1 <= k <= n:
        raise StructuralError(f"need 1 <= k <= n, got k={k}, n={n}")
    return ProblemSpec(g, rep, n, k)


def _angle(x: float) -> str:
    return repr(float(x))


def gate_to_json(gate) -> dict:
    if isinstance(gate, GlobalPhase):
        return {"kind": "global_phase", "angle": _angle(gate.angle)}
    if isinstance(gate, LetterPhase):
        return {"kind": "letter_phase", "qudit": gate.qudit, "letter": gate.letter,
                "angle": _angle(gate.angle)}
    if isinstance(gate, PairControl):
        return {"kind": "pair_control", "a": [gate.a, gate.ra], "b": [gate.b, gate.rb]}
    if isinstance(gate, LocalRot):
        return {"kind": "local_rot", "axis": gate.axis, "support": list(gate.support),
                "s": list(gate.s), "s2": list(gate.s2), "angle": _angle(gate.angle)}
    raise StructuralError(f"unknown gate {gate!r}")


def gate_from_json(obj: dict):
    kind = _need(obj, "kind", str)
    if kind == "global_phase":
        return GlobalPhase(float(_need(obj, "angle")))
    if kind == "letter_phase":
        return LetterPhase(int(_need(obj, "qudit")), int(_need(obj, "letter")),
                           float(_need(obj, "angle")))
    if kind == "pair_control":
        (a, ra), (b, rb) = _need(obj, "a", list), _need(obj, "b", list)
        return PairControl(int(a), int(ra), int(b), int(rb))
    if kind == "local_rot":
        return LocalRot(tuple(_need(obj, "support", list)), tuple(_need(obj, "s", list)),
                        tuple(_need(obj, "s2", list)), float(_need(obj, "angle")),
                        obj.get("axis", "X"))
    raise StructuralError(f"unknown gate kind {kind!r}")


def circuit_to_json(c: Circuit) -> dict:
    return {"schema": SCHEMA, "n": c.n, "d": c.d, "gates": [gate_to_json(g) for g in c.gates]}


def circuit_from_json(obj: dict) -> Circuit:
    _check_schema(obj)
    c = Circuit(_need(obj, "n", int), _need(obj, "d", int),
                [gate_from_json(g) for g in _need(obj, "gates", list)])
    c.validate()
    return c


def target_to_json(t: BlockTarget) -> dict:
    blocks = []
    for (charge, alpha) in sorted(t.blocks):
        B = t.blocks[(charge, alpha)]
        blocks.append({
            "charge": list(charge),
            "alpha": alpha,
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in B],
        })
    return {"schema": SCHEMA, "blocks": blocks}


def target_from_json(obj: dict) -> BlockTarget:
    _check_schema(obj)
    blocks = {}
    for b in _need(obj, "blocks", list):
        rows = _need(b, "matrix", list)
        try:
            arr = np.array(rows, dtype=float)
        except ValueError as exc:
            raise StructuralError(f"ragged block matrix: {exc}") from None
        if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
            raise StructuralError("block matrix must be square with [re, im] entries")
        key = (tuple(_need(b, "charge", list)), int(_need(b, "alpha")))
        blocks[key] = arr[..., 0] + 1j * arr[..., 1]
    return BlockTarget(blocks)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise StructuralError(f"{path}: invalid JSON ({exc})") from None


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".acf-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
