"""Exception types raised by the library.

Every error derives from :class:`CompressedModesError` so callers can catch the
whole family at once; most also subclass the matching builtin (``ValueError``,
``ArithmeticError``, ``RuntimeError``) so generic handlers keep working.
"""


class CompressedModesError(Exception):
    """Base class for all library errors."""


# grids, potentials, operators
class NonPositiveLength(CompressedModesError, ValueError):
    pass


class OddOrTinyNodeCount(CompressedModesError, ValueError):
    pass


class TabulatedLengthMismatch(CompressedModesError, ValueError):
    pass


class LengthMismatch(CompressedModesError, ValueError):
    pass


class GridMismatch(CompressedModesError, ValueError):
    pass


class ShapeMismatch(CompressedModesError, ValueError):
    pass


# reference spectra
class MTooLarge(CompressedModesError, ValueError):
    pass


class ZeroDenominator(CompressedModesError, ArithmeticError):
    pass


class UnnormalizedInput(CompressedModesError, ValueError):
    pass


# compressed-mode solver
class NegativeThreshold(CompressedModesError, ValueError):
    pass


class RankDeficient(CompressedModesError, ArithmeticError):
    pass


class SweepDivergence(CompressedModesError, RuntimeError):
    pass


class IndefiniteSystem(CompressedModesError, ValueError):
    pass


class InnerSolverStall(CompressedModesError, RuntimeError):
    pass


class MaxIterExceeded(CompressedModesError, RuntimeError):
    """Raised only when a caller asks for strict convergence."""


class ZeroModeCollapse(CompressedModesError, RuntimeError):
    pass


class SupportExceedsDomain(CompressedModesError, ValueError):
    pass


# compressed plane waves
class NewtonDivergence(CompressedModesError, RuntimeError):
    pass


class PoleCrossing(CompressedModesError, ArithmeticError):
    pass


class InfeasibleInput(CompressedModesError, ValueError):
    pass


class LevelMissing(CompressedModesError, KeyError):
    pass


class IncompatibleScale(CompressedModesError, ValueError):
    pass


class EmptyWindow(CompressedModesError, ValueError):
    pass


class KTooLarge(CompressedModesError, ValueError):
    pass


# experiment runner
class UnknownExperiment(CompressedModesError, KeyError):
    pass


class ConfigInvalid(CompressedModesError, ValueError):
    pass


class NonPositiveGap(CompressedModesError, ArithmeticError):
    pass
