"""Exception hierarchy shared by all qstrip modules."""


class QStripError(Exception):
    """Base class for every error raised by qstrip."""


class NotInvertible(QStripError, ArithmeticError):
    pass


class Divergent(QStripError, ArithmeticError):
    pass


class PoleAtZ(QStripError, ValueError):
    pass


class NoConvergence(QStripError, RuntimeError):
    pass


class DirectionMismatch(QStripError, ValueError):
    pass


class IndicialObstruction(QStripError, ArithmeticError):
    def __init__(self, n, message=None):
        self.n = n
        super().__init__(message or f"degree-0 symbol not invertible at n={n}")


class UnsupportedFraming(QStripError, ValueError):
    pass


class TruncatedCoefficient(QStripError, ValueError):
    pass


class ResidualNonzero(QStripError, AssertionError):
    def __init__(self, where, message=None):
        self.where = where
        super().__init__(message or f"residual nonzero, first failing order {where}")


class ConvergenceDomain(QStripError, ValueError):
    pass


class NonTerminating(QStripError, ValueError):
    pass


class NonUnitConstant(QStripError, ValueError):
    pass


class NoUnitBranch(QStripError, ValueError):
    pass


class ConvergenceBudget(QStripError, RuntimeError):
    pass


class ConfigInvalid(QStripError, ValueError):
    pass
