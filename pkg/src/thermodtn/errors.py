"""Exception hierarchy shared by every subpackage."""


class ThermoDtnError(Exception):
    """Base class for all errors raised by :mod:`thermodtn`."""


# algebra
class DivisionByZeroJet(ThermoDtnError, ZeroDivisionError):
    pass


class SqrtBranchError(ThermoDtnError, ValueError):
    pass


class IndexOutOfOrder(ThermoDtnError, IndexError):
    pass


class InsufficientJetOrder(ThermoDtnError, ValueError):
    pass


class OrderMismatch(ThermoDtnError, ValueError):
    pass


# geometry
class SingularMetric(ThermoDtnError, ValueError):
    pass


class ZeroCovector(ThermoDtnError, ValueError):
    pass


# material
class InadmissibleMaterial(ThermoDtnError, ValueError):
    """A coefficient violates ``mu > 0``, ``lambda + mu >= 0`` or ``alpha > 0``."""


# symbol calculus / assembly
class ResidualTooLarge(ThermoDtnError, ArithmeticError):
    pass


# reconstruction
class InconsistentSymbol(ThermoDtnError, ValueError):
    pass


class RankDeficientLayer(ThermoDtnError, ArithmeticError):
    pass


class ToleranceExceeded(ThermoDtnError, ArithmeticError):
    pass


class IllConditionedFit(ThermoDtnError, ArithmeticError):
    pass


# oracles
class ModeDeficiency(ThermoDtnError, ArithmeticError):
    pass


class NearDefectiveModes(ThermoDtnError, ArithmeticError):
    pass


class SolverSingular(ThermoDtnError, ArithmeticError):
    pass


class NotConverged(ThermoDtnError, ArithmeticError):
    pass


# manifest / CLI
class ManifestError(ThermoDtnError, ValueError):
    pass
