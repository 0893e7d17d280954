"""
The variables of the collar problem: x_1..x_n followed by the cotangent variables xi_1..xi_{n-1}
"""
from lamedtn.jet.series import Jet


class JetSpace:
    """
    Jets in the 2n-1 collar variables at a fixed order
    :ivar dim: spatial dimension n
    :type dim: int
    :ivar order: jet order K
    :type order: int
    """
    def __init__(self, dim, order):
        if dim < 2:
            raise ValueError(f'Collar dimension must be at least 2, not {dim}')
        self.dim = dim
        self.order = order
        self.n_vars = 2*dim-1

    def __eq__(self, other):
        return isinstance(other, JetSpace) and (self.dim, self.order) == (other.dim, other.order)

    def __hash__(self):
        return hash((self.dim, self.order))

    def x(self, k):
        """
        :returns: variable index of x_{k+1} (zero-based C{k})
        """
        return k

    @property
    def normal(self):
        """
        Variable index of the normal coordinate x_n
        """
        return self.dim-1

    def xi(self, beta):
        """
        :returns: variable index of xi_{beta+1} (zero-based C{beta})
        """
        return self.dim+beta

    @property
    def tangential(self):
        return list(range(self.dim-1))

    @property
    def cotangent(self):
        return [self.xi(beta) for beta in range(self.dim-1)]

    def constant(self, value, order=None):
        return Jet.constant(self.n_vars, self.order if order is None else order, value)

    def zero(self, order=None):
        return self.constant(0., order)

    def coordinate(self, k):
        """
        :returns: the jet of the offset x_{k+1} - x0_{k+1}
        """
        return Jet.variable(self.n_vars, self.order, self.x(k))

    def covector(self, beta, xi0):
        """
        :returns: the jet of xi_{beta+1} at the base covector C{xi0}
        """
        return Jet.variable(self.n_vars, self.order, self.xi(beta), float(xi0[beta]))

    def polynomial(self, terms):
        """
        Jet of a polynomial in the spatial offsets
        :param terms: iterable of C{(exponents, coefficient)} with one exponent per spatial coordinate
        """
        padded = {}
        for exponents, coefficient in terms:
            exponents = tuple(int(e) for e in exponents)
            if len(exponents) != self.dim:
                raise ValueError(f'Monomial {exponents} needs {self.dim} exponents')
            index = exponents+(0,)*(self.dim-1)
            padded[index] = padded.get(index, 0.)+coefficient
        return Jet.from_terms(self.n_vars, self.order, padded)
