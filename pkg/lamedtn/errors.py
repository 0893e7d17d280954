"""
Exception classes raised by the symbol engine, the reference solvers and the command-line front end
"""


class LameError(Exception):
    """
    Common base of every error raised inside L{lamedtn}
    """
    pass


class StructureError(LameError, ValueError):
    """
    Operands do not share variable count, dimension or homogeneity degree
    """
    pass


class SingularityError(LameError, ArithmeticError):
    """
    A quantity that must be inverted (or square-rooted) vanishes at the base point
    :ivar quantity: name of the offending quantity
    :type quantity: str
    """
    def __init__(self, quantity, message=None):
        self.quantity = quantity
        if message is None:
            message = f'{quantity} is singular at the base point'
        LameError.__init__(self, message)


class BudgetError(LameError, ValueError):
    """
    A jet does not carry enough derivative order for the requested operation
    :ivar needed: number of derivatives requested
    :ivar available: remaining jet order
    """
    def __init__(self, needed, available, what='jet'):
        self.needed = needed
        self.available = available
        LameError.__init__(self, f'{what} needs {needed} derivative(s) but only order {available} is available')


class CollarError(LameError, ValueError):
    """
    Collar data violate the admissibility conditions (metric, Lame coefficients or covector)
    """
    pass


class ConditioningError(LameError, RuntimeError):
    """
    A linear solve is numerically singular, or a decaying basis is rank deficient
    """
    pass


class IntegrationError(LameError, RuntimeError):
    """
    Numerical integration of the layered medium failed
    :ivar xi_norm: cotangent magnitude at which the failure occurred
    """
    def __init__(self, xi_norm, message):
        self.xi_norm = xi_norm
        LameError.__init__(self, f'|xi|={xi_norm}: {message}')


class DataInconsistencyError(LameError, ValueError):
    """
    Symbol data cannot come from any admissible pair of Lame coefficients
    """
    pass


class ConfigError(LameError, ValueError):
    """
    Malformed experiment configuration
    :ivar path: dotted path of the offending field
    """
    def __init__(self, path, message):
        self.path = path
        LameError.__init__(self, f'{path}: {message}')
