"""Exception hierarchy shared across the package.

Every error raised on purpose by steerlab derives from :class:`SteerlabError`,
so callers can catch one type at the boundary (the CLI does exactly that).
"""


class SteerlabError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(SteerlabError):
    """Operands have incompatible shapes or factor dimensions."""


class NotHermitian(SteerlabError):
    """A matrix required to be Hermitian is not, beyond tolerance."""


class NotUnitary(SteerlabError):
    """A matrix required to be unitary is not, beyond tolerance."""


class NotOrthonormal(SteerlabError):
    """A vector family required to be orthonormal is not, beyond tolerance."""


class DomainError(SteerlabError):
    """A scalar argument lies outside its admissible range."""


class DegenerateOutcome(SteerlabError):
    """A sampled measurement outcome has vanishing probability; the
    post-measurement state cannot be renormalized."""


class AgreeViolation(SteerlabError):
    """The cross-Gram constraint between expansion vectors and the reduced
    density matrix's spectrum fails: the supplied eigenbasis does not belong
    to this state's marginal."""


class MarginalMismatch(SteerlabError):
    """Two purifications do not share the same reduced density matrix."""


class BobTooSmall(SteerlabError):
    """The auxiliary (pointer) system is too small to hold one orthonormal
    pointer state per ensemble element."""


class NotADecomposition(SteerlabError):
    """A candidate ensemble does not average to the required density matrix."""


class ResidualOutcome(SteerlabError):
    """A steering measurement landed in the residual complement subspace,
    which carries no target state."""


class ConfigConflict(SteerlabError):
    """A protocol configuration combines options that contradict each other."""


class ParseError(SteerlabError):
    """Malformed serialized input (JSON layout, not physics)."""


class ConvergenceError(SteerlabError):
    """An iterative routine exhausted its sweep budget."""
