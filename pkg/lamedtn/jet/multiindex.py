"""
Ranked multi-index tables shared by all jets with the same variable count and order.

Multi-indices are stored in graded order (all indices of total degree 0, then 1, ...), so the
coefficients of a jet truncated to a lower order are a prefix of the original coefficient array.
"""
import functools
import logging
import math

import numpy as np
import scipy.sparse


def degree_shell(n_vars, degree):
    """
    :returns: all multi-indices in C{n_vars} variables of exactly the given total degree, in lexicographically descending order
    :rtype: list(tuple)
    """
    if n_vars == 1:
        return [(degree,)]
    shell = []
    for first in range(degree, -1, -1):
        for rest in degree_shell(n_vars-1, degree-first):
            shell.append((first,)+rest)
    return shell


@functools.lru_cache(maxsize=None)
def multi_indices(n_vars, order):
    """
    :returns: every multi-index of total degree at most C{order}, in graded order
    :rtype: tuple(tuple)
    """
    indices = []
    for degree in range(order+1):
        indices += degree_shell(n_vars, degree)
    return tuple(indices)


def count(n_vars, order):
    """
    :returns: the number of coefficients of a jet in C{n_vars} variables truncated at C{order}
    :rtype: int
    """
    if order < 0:
        return 0
    return math.comb(n_vars+order, order)


def factorial(index):
    """
    Exact multi-index factorial J! = J_1! J_2! ...
    :rtype: int
    """
    result = 1
    for entry in index:
        result *= math.factorial(entry)
    return result


class MultiIndexTable:
    """
    Lookup tables for jets in a fixed number of variables up to a fixed order
    :ivar indices: ranked multi-indices
    :type indices: tuple(tuple)
    :ivar exponents: the same indices as an integer array of shape (size, n_vars)
    :ivar degrees: total degree of each ranked index
    :ivar rank: map from multi-index to its position
    :type rank: dict
    """
    def __init__(self, n_vars, order):
        self.n_vars = n_vars
        self.order = order
        self.indices = multi_indices(n_vars, order)
        self.size = len(self.indices)
        self.exponents = np.array(self.indices, dtype=int).reshape(self.size, n_vars)
        self.degrees = self.exponents.sum(axis=1)
        self.rank = {index: position for position, index in enumerate(self.indices)}
        self._products = None
        self._partials = {}

    def prefix(self, order):
        """
        :returns: the number of leading coefficients that make up a jet of the given (lower) order
        """
        return count(self.n_vars, min(order, self.order))

    @property
    def products(self):
        """
        Pair table for the truncated Cauchy product: coefficient C{left[i]*right[j]} accumulates into C{k}
        :returns: C{(left, right, scatter)} where C{scatter} is a sparse (size, pairs) summation matrix
        """
        if self._products is None:
            left = []
            right = []
            target = []
            for i, first in enumerate(self.indices):
                room = self.order - self.degrees[i]
                for j in range(self.prefix(room)):
                    left.append(i)
                    right.append(j)
                    target.append(self.rank[tuple(a+b for a, b in zip(first, self.indices[j]))])
            pairs = len(target)
            scatter = scipy.sparse.csr_matrix((np.ones(pairs), (np.array(target), np.arange(pairs))),
                                              shape=(self.size, pairs))
            self._products = (np.array(left, dtype=int), np.array(right, dtype=int), scatter)
            logging.debug(f'Product table for {self.n_vars} variables at order {self.order}: {pairs} pairs')
        return self._products

    def partial(self, var):
        """
        Index map for differentiation with respect to one variable
        :returns: C{(source, factor)} so that the derivative's coefficient C{t} (order reduced by one) is C{factor[t]*coeffs[source[t]]}
        """
        try:
            return self._partials[var]
        except KeyError:
            size = self.prefix(self.order-1)
            source = np.zeros(size, dtype=int)
            factor = np.zeros(size)
            for position in range(size):
                shifted = list(self.indices[position])
                factor[position] = shifted[var]+1
                shifted[var] += 1
                source[position] = self.rank[tuple(shifted)]
            self._partials[var] = (source, factor)
            return self._partials[var]

    def mask(self, variables):
        """
        :returns: boolean mask of the coefficients whose exponents vanish in every one of the given variables
        """
        variables = list(variables)
        if not variables:
            return np.ones(self.size, dtype=bool)
        return np.all(self.exponents[:, variables] == 0, axis=1)

    def power_slice(self, var, power):
        """
        Positions holding the coefficients of C{var**power} times monomials free of C{var}
        :returns: C{(source, target)} position arrays, C{target} ranked in the table of order C{order-power}
        """
        reduced = table(self.n_vars, self.order-power)
        source = []
        target = []
        for position, index in enumerate(reduced.indices):
            if index[var] == 0:
                shifted = list(index)
                shifted[var] = power
                source.append(self.rank[tuple(shifted)])
                target.append(position)
        return np.array(source, dtype=int), np.array(target, dtype=int)


@functools.lru_cache(maxsize=None)
def table(n_vars, order):
    """
    :returns: the shared table for the given variable count and order
    :rtype: L{MultiIndexTable}
    """
    return MultiIndexTable(n_vars, order)
