"""Exception types shared by the gvlab modules."""


class GVLabError(Exception):
    """Base class for all errors raised by gvlab."""


class InvalidArgumentError(GVLabError, ValueError):
    pass


class OutOfRangeError(GVLabError, IndexError):
    pass


class DomainError(GVLabError, ValueError):
    pass


class NotInvertibleError(GVLabError, ZeroDivisionError):
    pass


class SingularError(GVLabError, ZeroDivisionError):
    pass


class UnsupportedError(GVLabError, TypeError):
    pass


class PoleProximityError(GVLabError, ValueError):
    pass


class PrecisionError(GVLabError, ArithmeticError):
    pass


class ConvergenceError(GVLabError, ArithmeticError):
    """An iterative procedure hit its iteration cap or could not certify a result."""


class TruncationError(GVLabError, ArithmeticError):
    pass
