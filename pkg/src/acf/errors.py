"""Exception types shared across the package."""


class AcfError(Exception):
    """Base class for all errors raised by acf."""


class StructuralError(AcfError, ValueError):
    """Malformed input: wrong lengths, letters out of range, bad moduli."""


class ResourceError(AcfError):
    """A configured size cap would be exceeded."""


class ReachabilityError(AcfError):
    """Two basis strings do not lie in the same invariant subspace."""


class InvalidGeneratorError(AcfError, ValueError):
    """A redistribution generator does not conserve charge."""


class InvalidTargetError(AcfError, ValueError):
    """A target unitary is not unitary or mixes invariant subspaces."""


class PhaseObstructionError(AcfError):
    """A strict target has a block determinant different from 1.

    Locality forbids arbitrary relative phases between sectors (type-I
    constraint), so such a target cannot be compiled without an ancilla.
    ``determinants`` maps block keys to the offending determinants.
    """

    def __init__(self, message, determinants=None):
        super().__init__(message)
        self.determinants = dict(determinants or {})


class ClosureError(AcfError):
    """Lie closure did not stabilise within the round cap."""
