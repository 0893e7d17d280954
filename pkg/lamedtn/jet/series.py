"""
Truncated multivariate Taylor series (jets) with complex coefficients.

The functions at the top act on raw coefficient arrays whose last axis runs over ranked
multi-indices, so that matrices and higher tensors of jets share the same arithmetic.
"""
import math

import numpy as np

from lamedtn.errors import BudgetError, SingularityError, StructureError
from lamedtn.jet.multiindex import count, table


def truncate(coeffs, n_vars, order):
    """
    :returns: the leading coefficients of a coefficient array, i.e., the same jets at a lower order
    """
    return coeffs[..., :count(n_vars, order)]


def multiply(left, right, n_vars, order):
    """
    Truncated Cauchy product of coefficient arrays, broadcasting over all leading axes
    :param order: order of the result; both operands must carry at least this many coefficients
    """
    first, second, scatter = table(n_vars, order).products
    size = count(n_vars, order)
    terms = truncate(left, n_vars, order)[..., first]*truncate(right, n_vars, order)[..., second]
    return scatter_terms(terms, scatter, size)


def scatter_terms(terms, scatter, size):
    """
    Sum pairwise products into their target coefficients
    """
    shape = terms.shape[:-1]
    flat = terms.reshape(-1, terms.shape[-1])
    return np.asarray(scatter @ flat.T).T.reshape(shape+(size,))


def differentiate(coeffs, n_vars, order, var):
    """
    Partial derivative of a coefficient array along one variable; the result has order C{order-1}
    """
    if order < 1:
        raise BudgetError(1, order)
    source, factor = table(n_vars, order).partial(var)
    return coeffs[..., source]*factor


def compose(coeffs, n_vars, order, series):
    """
    Evaluate a univariate function on jets through its Taylor coefficients at the constant term
    :param series: coefficients f(a0), f'(a0), f''(a0)/2, ... (at least C{order+1} of them)
    """
    shift = np.array(coeffs, dtype=complex)
    shift[..., 0] = 0.
    result = np.zeros_like(shift)
    result[..., 0] = series[order]
    for power in range(order-1, -1, -1):
        result = multiply(shift, result, n_vars, order)
        result[..., 0] += series[power]
    return result


class Jet:
    """
    Truncated Taylor expansion at a base point in C{n_vars} variables
    :cvar epsilon: relative tolerance used to decide that a jet vanishes
    :ivar n_vars: number of variables
    :type n_vars: int
    :ivar order: maximal total degree carried (the remaining derivative budget)
    :type order: int
    :ivar coeffs: Taylor coefficients (derivative divided by multi-index factorial) in graded order
    :type coeffs: numpy.ndarray
    """
    epsilon = 1e-12
    __array_ufunc__ = None

    def __init__(self, n_vars, order, coeffs=None):
        if order < 0:
            raise BudgetError(-order, 0)
        self.n_vars = n_vars
        self.order = order
        size = count(n_vars, order)
        if coeffs is None:
            self.coeffs = np.zeros(size, dtype=complex)
        else:
            coeffs = np.asarray(coeffs, dtype=complex)
            if coeffs.shape != (size,):
                raise StructureError(f'Expected {size} coefficients for {n_vars} variables at order {order}, '
                                     f'received shape {coeffs.shape}')
            self.coeffs = coeffs

    @classmethod
    def constant(cls, n_vars, order, value):
        jet = cls(n_vars, order)
        jet.coeffs[0] = value
        return jet

    @classmethod
    def variable(cls, n_vars, order, var, value=0.):
        """
        :returns: the jet of the coordinate function C{var}, whose value at the base point is C{value}
        """
        jet = cls.constant(n_vars, order, value)
        if order > 0:
            unit = [0]*n_vars
            unit[var] = 1
            jet.coeffs[table(n_vars, order).rank[tuple(unit)]] = 1.
        return jet

    @classmethod
    def from_terms(cls, n_vars, order, terms):
        """
        :param terms: map from multi-index to Taylor coefficient; terms beyond C{order} are dropped
        :type terms: dict
        """
        jet = cls(n_vars, order)
        ranks = table(n_vars, order).rank
        for index, value in terms.items():
            index = tuple(index)
            if len(index) != n_vars:
                raise StructureError(f'Multi-index {index} does not have {n_vars} entries')
            if sum(index) <= order:
                jet.coeffs[ranks[index]] += value
        return jet

    @property
    def value(self):
        """
        :returns: the value at the base point
        :rtype: complex
        """
        return self.coeffs[0]

    def coefficient(self, index):
        """
        :returns: the Taylor coefficient of the given multi-index (zero beyond the carried order)
        """
        index = tuple(index)
        if sum(index) > self.order:
            return 0j
        return self.coeffs[table(self.n_vars, self.order).rank[index]]

    def derivative(self, index):
        """
        :returns: the partial derivative of the given multi-index at the base point
        """
        return self.coefficient(index)*math.prod(math.factorial(entry) for entry in index)

    def _align(self, other):
        if self.n_vars != other.n_vars:
            raise StructureError(f'Cannot combine jets in {self.n_vars} and {other.n_vars} variables')
        return min(self.order, other.order)

    def truncate(self, order):
        if order > self.order:
            raise BudgetError(order, self.order)
        return Jet(self.n_vars, order, truncate(self.coeffs, self.n_vars, order).copy())

    def __add__(self, other):
        if isinstance(other, Jet):
            order = self._align(other)
            return Jet(self.n_vars, order, truncate(self.coeffs, self.n_vars, order) +
                       truncate(other.coeffs, self.n_vars, order))
        result = Jet(self.n_vars, self.order, self.coeffs.copy())
        result.coeffs[0] += other
        return result

    def __radd__(self, other):
        return self + other

    def __neg__(self):
        return Jet(self.n_vars, self.order, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            order = self._align(other)
            return Jet(self.n_vars, order, multiply(self.coeffs, other.coeffs, self.n_vars, order))
        elif isinstance(other, (int, float, complex, np.number)):
            return Jet(self.n_vars, self.order, self.coeffs*other)
        else:
            return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return Jet(self.n_vars, self.order, other*self.coeffs)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self*other.inverse()
        return Jet(self.n_vars, self.order, self.coeffs/other)

    def __rtruediv__(self, other):
        return self.inverse()*other

    def __pow__(self, exponent):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError(f'Only non-negative integer powers of jets are supported, not {exponent}')
        result = Jet.constant(self.n_vars, self.order, 1.)
        for _ in range(exponent):
            result = result*self
        return result

    def inverse(self, name='jet'):
        """
        Multiplicative inverse to the carried order
        :param name: label reported if the constant term vanishes
        """
        value = self.value
        if abs(value) <= self.epsilon*max(1., self.max_norm()):
            raise SingularityError(name, f'{name} has zero constant term; cannot invert')
        series = [(-1)**power/value**(power+1) for power in range(self.order+1)]
        return Jet(self.n_vars, self.order, compose(self.coeffs, self.n_vars, self.order, series))

    def sqrt(self, name='jet'):
        """
        Principal square root; the constant term must be real and positive
        """
        value = self.value
        if value.real <= 0 or abs(value.imag) > self.epsilon*max(1., abs(value)):
            raise SingularityError(name, f'{name} must have a real positive constant term, not {value}')
        root = math.sqrt(value.real)
        series = [math.prod((0.5-j) for j in range(power))/math.factorial(power)*root/value.real**power
                  for power in range(self.order+1)]
        return Jet(self.n_vars, self.order, compose(self.coeffs, self.n_vars, self.order, series))

    def partial(self, var):
        """
        :returns: derivative along one variable, carrying one order less
        """
        return Jet(self.n_vars, self.order-1, differentiate(self.coeffs, self.n_vars, self.order, var))

    def restrict(self, variables):
        """
        :returns: the jet with every coefficient involving the given variables removed (i.e., those variables frozen at the base point)
        """
        mask = table(self.n_vars, self.order).mask(variables)
        return Jet(self.n_vars, self.order, np.where(mask, self.coeffs, 0.))

    def power_slice(self, var, power):
        """
        :returns: the coefficient of C{var**power} as a jet in the remaining variables, of order C{order-power}
        """
        if power > self.order:
            raise BudgetError(power, self.order)
        source, target = table(self.n_vars, self.order).power_slice(var, power)
        result = Jet(self.n_vars, self.order-power)
        result.coeffs[target] = self.coeffs[source]
        return result

    def with_power_slice(self, var, power, piece):
        """
        :returns: a copy whose C{var**power} slice is replaced by C{piece} (a jet free of C{var})
        """
        if piece.order < self.order-power:
            raise BudgetError(self.order-power, piece.order, 'slice')
        source, target = table(self.n_vars, self.order).power_slice(var, power)
        coeffs = self.coeffs.copy()
        coeffs[source] = truncate(piece.coeffs, self.n_vars, self.order-power)[target]
        return Jet(self.n_vars, self.order, coeffs)

    def translate(self, offset):
        """
        Re-expand the truncated polynomial around the point C{base + offset}
        """
        lookup = table(self.n_vars, self.order)
        result = np.zeros_like(self.coeffs)
        offset = np.asarray(offset, dtype=complex)
        for position, index in enumerate(lookup.indices):
            value = self.coeffs[position]
            if value == 0:
                continue
            for target, lower in enumerate(lookup.indices[:lookup.prefix(lookup.degrees[position])]):
                if all(b <= a for a, b in zip(index, lower)):
                    weight = math.prod(math.comb(a, b)*offset[var]**(a-b)
                                       for var, (a, b) in enumerate(zip(index, lower)))
                    result[target] += weight*value
        return Jet(self.n_vars, self.order, result)

    def conjugate(self):
        return Jet(self.n_vars, self.order, self.coeffs.conjugate())

    @property
    def real(self):
        return Jet(self.n_vars, self.order, self.coeffs.real.astype(complex))

    def max_norm(self):
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.

    def is_zero(self, scale=1., tolerance=None):
        """
        :param scale: magnitude of the inputs the jet was computed from
        :returns: C{True} iff every coefficient is below the tolerance relative to C{scale}
        """
        if tolerance is None:
            tolerance = self.epsilon
        return self.max_norm() <= tolerance*max(scale, 1.)

    def __eq__(self, other):
        if isinstance(other, Jet):
            delta = self - other
            return delta.is_zero(max(self.max_norm(), other.max_norm()))
        return (self - other).is_zero(max(self.max_norm(), abs(other)))

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return f'Jet(n_vars={self.n_vars}, order={self.order}, value={self.value})'
