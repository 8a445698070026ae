"""Analysis and compilation of quantum circuits with Abelian symmetries.

Submodules: ``groups`` (charges and representations), ``sectors``
(charge sectors and dimension bookkeeping), ``reachability`` (invariant
subspaces and paths), ``compiler`` (synthesis into k-local symmetric
gates), ``simulator`` (dense checks) and ``oracle`` (brute-force Lie
algebra ground truth).
"""

from .circuit import Circuit, GlobalPhase, LetterPhase, LocalRot, PairControl
from .compiler import BlockTarget, compile_target, synth_block_unitary
from .groups import AbelianGroup, QuditRep, cyclic, make_rep, u1
from .reachability import components, is_semi_universal
from .sectors import enumerate_sectors

__version__ = "0.1.0"

__all__ = [
    "AbelianGroup",
    "BlockTarget",
    "Circuit",
    "GlobalPhase",
    "LetterPhase",
    "LocalRot",
    "PairControl",
    "QuditRep",
    "compile_target",
    "components",
    "cyclic",
    "enumerate_sectors",
    "is_semi_universal",
    "make_rep",
    "synth_block_unitary",
    "u1",
]
