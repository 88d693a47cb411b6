"""Exception hierarchy.

Two families matter to callers: :class:`InputError` (bad arguments or
malformed files, CLI exit code 1) and :class:`NumericalFailure` (a genuine
numerical outcome such as small-divisor overflow or a fiber mismatch, CLI
exit code 3).
"""


class WarpedBundleError(Exception):
    """Base class for all package errors."""


class InputError(WarpedBundleError, ValueError):
    """Invalid user input."""


class NumericalFailure(WarpedBundleError, ArithmeticError):
    """A computation could not be completed within its numerical contract."""


# rotation
class FloatLooksRational(InputError):
    """The continued fraction of a float terminates or blows up early."""


class DepthExceedsExpansion(InputError):
    pass


# quotient
class AmbiguousMatch(NumericalFailure):
    """Two integers in the match window both relate the points."""


class NotSameFiber(NumericalFailure):
    pass


class WindowExhausted(NumericalFailure):
    """The points may be related, but not by any |n| within the window."""


class BranchJumpWithoutZero(NumericalFailure):
    """The branch integer changed between adjacent non-degenerate nodes."""


# cohomology
class RadiusOutOfRange(InputError):
    pass


class UnknownBuiltin(InputError):
    pass


class MalformedTable(InputError):
    pass


class SmallDivisorOverflow(NumericalFailure):
    """Some Fourier coefficient of the solution exceeds the overflow guard."""


class ResidualTooLarge(NumericalFailure):
    pass


# bundle
class GridMismatch(InputError):
    """A lift candidate returned a path on the wrong grid."""


class InitialValueMismatch(InputError):
    pass


# cli
class MalformedCSV(InputError):
    pass
