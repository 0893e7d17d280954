"""
Square matrices of jets tagged with a homogeneity degree in the cotangent variables
"""
import numpy as np

from lamedtn.errors import BudgetError, SingularityError, StructureError
from lamedtn.jet.multiindex import count, table
from lamedtn.jet.series import Jet, differentiate, multiply, scatter_terms, truncate


class SymbolMatrix:
    """
    Matrix-valued symbol stored as an (n, n, size) coefficient array
    :cvar epsilon: relative tolerance for treating a symbol as zero
    :ivar degree: declared homogeneity degree in xi'
    :type degree: int
    """
    epsilon = 1e-12
    __array_ufunc__ = None

    def __init__(self, coeffs, n_vars, order, degree=0):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim != 3 or coeffs.shape[0] != coeffs.shape[1] or coeffs.shape[2] != count(n_vars, order):
            raise StructureError(f'Coefficient array of shape {coeffs.shape} is not a square matrix of jets in '
                                 f'{n_vars} variables at order {order}')
        self.coeffs = coeffs
        self.n_vars = n_vars
        self.order = order
        self.degree = degree

    @classmethod
    def zeros(cls, dim, n_vars, order, degree=0):
        return cls(np.zeros((dim, dim, count(n_vars, order)), dtype=complex), n_vars, order, degree)

    @classmethod
    def identity(cls, dim, n_vars, order, degree=0):
        result = cls.zeros(dim, n_vars, order, degree)
        result.coeffs[range(dim), range(dim), 0] = 1.
        return result

    @classmethod
    def from_entries(cls, entries, degree=0, n_vars=None, order=None):
        """
        :param entries: square nested list of L{Jet} objects or plain numbers
        :param order: order of the result (default: the minimum order of the jet entries)
        """
        jets = [entry for row in entries for entry in row if isinstance(entry, Jet)]
        if jets:
            n_vars = jets[0].n_vars
            if any(jet.n_vars != n_vars for jet in jets):
                raise StructureError('Matrix entries live in different numbers of variables')
            lowest = min(jet.order for jet in jets)
            order = lowest if order is None else min(order, lowest)
        elif n_vars is None or order is None:
            raise StructureError('A matrix of plain numbers needs n_vars and order')
        dim = len(entries)
        result = cls.zeros(dim, n_vars, order, degree)
        for row, line in enumerate(entries):
            if len(line) != dim:
                raise StructureError(f'Row {row} has {len(line)} entries in a {dim}x{dim} matrix')
            for col, entry in enumerate(line):
                if isinstance(entry, Jet):
                    result.coeffs[row, col] = truncate(entry.coeffs, n_vars, order)
                else:
                    result.coeffs[row, col, 0] = entry
        return result

    @property
    def dim(self):
        return self.coeffs.shape[0]

    def __getitem__(self, key):
        row, col = key
        return Jet(self.n_vars, self.order, self.coeffs[row, col].copy())

    def value(self):
        """
        :returns: the matrix at the base point
        :rtype: numpy.ndarray
        """
        return self.coeffs[:, :, 0].copy()

    def with_degree(self, degree):
        return SymbolMatrix(self.coeffs, self.n_vars, self.order, degree)

    def truncate(self, order):
        if order > self.order:
            raise BudgetError(order, self.order)
        return SymbolMatrix(truncate(self.coeffs, self.n_vars, order).copy(), self.n_vars, order, self.degree)

    def _align(self, other):
        if self.n_vars != other.n_vars or self.dim != other.dim:
            raise StructureError(f'Cannot combine {self.dim}x{self.dim} symbols in {self.n_vars} variables with '
                                 f'{other.dim}x{other.dim} symbols in {other.n_vars} variables')
        return min(self.order, other.order)

    def __add__(self, other):
        if not isinstance(other, SymbolMatrix):
            return NotImplemented
        order = self._align(other)
        if self.degree != other.degree:
            raise StructureError(f'Cannot add symbols of degree {self.degree} and {other.degree}')
        return SymbolMatrix(truncate(self.coeffs, self.n_vars, order)+truncate(other.coeffs, self.n_vars, order),
                            self.n_vars, order, self.degree)

    def __neg__(self):
        return SymbolMatrix(-self.coeffs, self.n_vars, self.order, self.degree)

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other):
        if not isinstance(other, SymbolMatrix):
            return NotImplemented
        order = self._align(other)
        first, second, scatter = table(self.n_vars, order).products
        terms = np.einsum('ijp,jkp->ikp', truncate(self.coeffs, self.n_vars, order)[:, :, first],
                          truncate(other.coeffs, self.n_vars, order)[:, :, second])
        return SymbolMatrix(scatter_terms(terms, scatter, count(self.n_vars, order)), self.n_vars, order,
                            self.degree+other.degree)

    def __mul__(self, other):
        """
        Entrywise scaling by a number or a scalar jet; the degree tag is left unchanged
        """
        if isinstance(other, Jet):
            if other.n_vars != self.n_vars:
                raise StructureError(f'Cannot scale symbols in {self.n_vars} variables by a jet in {other.n_vars}')
            order = min(self.order, other.order)
            return SymbolMatrix(multiply(self.coeffs, other.coeffs, self.n_vars, order), self.n_vars, order,
                                self.degree)
        elif isinstance(other, (int, float, complex, np.number)):
            return SymbolMatrix(self.coeffs*other, self.n_vars, self.order, self.degree)
        return NotImplemented

    def __rmul__(self, other):
        return self*other

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self*other.inverse()
        return SymbolMatrix(self.coeffs/other, self.n_vars, self.order, self.degree)

    def partial(self, var):
        return SymbolMatrix(differentiate(self.coeffs, self.n_vars, self.order, var), self.n_vars, self.order-1,
                            self.degree)

    def partial_multi(self, variables, index):
        """
        Repeated differentiation: C{index[i]} derivatives along C{variables[i]}
        """
        result = self
        for var, times in zip(variables, index):
            for _ in range(times):
                result = result.partial(var)
        return result

    def restrict(self, variables):
        """
        :returns: the symbol with the given variables frozen at the base point
        """
        mask = table(self.n_vars, self.order).mask(variables)
        return SymbolMatrix(np.where(mask, self.coeffs, 0.), self.n_vars, self.order, self.degree)

    def inverse(self, name='matrix'):
        """
        Inverse through the Neumann series around the constant term
        """
        base = self.value()
        if np.linalg.cond(base) > 1/self.epsilon:
            raise SingularityError(name, f'{name} is singular at the base point')
        base_inverse = SymbolMatrix.zeros(self.dim, self.n_vars, self.order, -self.degree)
        base_inverse.coeffs[:, :, 0] = np.linalg.inv(base)
        step = base_inverse.with_degree(0) @ self.with_degree(0)
        step.coeffs[:, :, 0] -= np.eye(self.dim)
        unit = SymbolMatrix.identity(self.dim, self.n_vars, self.order)
        result = unit
        for _ in range(self.order):
            result = unit - step @ result
        return (result @ base_inverse).with_degree(-self.degree)

    def max_norm(self):
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.

    def is_zero(self, scale=1., tolerance=None):
        if tolerance is None:
            tolerance = self.epsilon
        return self.max_norm() <= tolerance*max(scale, 1.)

    def distance(self, other):
        """
        :returns: the max-norm of the difference over all entries and coefficients (at the common order)
        """
        order = self._align(other)
        return float(np.max(np.abs(truncate(self.coeffs, self.n_vars, order) -
                                   truncate(other.coeffs, self.n_vars, order))))

    def __eq__(self, other):
        if not isinstance(other, SymbolMatrix):
            return NotImplemented
        return self.degree == other.degree and \
            self.distance(other) <= self.epsilon*max(self.max_norm(), other.max_norm(), 1.)

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return f'SymbolMatrix(dim={self.dim}, order={self.order}, degree={self.degree})\n{self.value()}'
