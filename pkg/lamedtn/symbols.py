"""
Symbols of the Lame operator in boundary normal coordinates.

Writing L = A(D_n^2 + B D_n + C) with A = diag(mu I, lambda+2mu), the symbols of B and C and of
the boundary traction N = A D_n + D are expanded here as matrices of jets (symbol convention:
the tangential derivative d_beta has symbol i xi_beta).
"""
import logging

from lamedtn.geometry import christoffel, cotangent, inverse_metric
from lamedtn.jet import SymbolMatrix


def _total(jets, start):
    result = start
    for jet in jets:
        result = result+jet
    return result


class _Fields:
    """
    Scalar jets shared by the symbol builders
    """
    def __init__(self, collar):
        space = collar.space
        self.space = space
        self.dim = space.dim
        self.normal = space.dim-1
        self.lam = collar.lam
        self.mu = collar.mu
        self.lam2mu = self.lam+2*self.mu
        self.inv_mu = self.mu.inverse('mu')
        self.inv_lam2mu = self.lam2mu.inverse('lambda+2mu')
        self.ratio = self.mu*self.inv_lam2mu
        self.ginv = inverse_metric(collar)
        self.cotangent = cotangent(collar)
        self.dlam = [self.lam.partial(space.x(k)) for k in range(self.dim)]
        self.dmu = [self.mu.partial(space.x(k)) for k in range(self.dim)]
        self.grad_lam = [self.raise_index(self.dlam, alpha) for alpha in range(self.dim-1)]

    def zero(self):
        return self.space.zero()

    def raise_index(self, lowered, alpha):
        """
        :returns: g^{alpha beta} v_beta for a tangential covector field C{lowered}
        """
        return _total((self.ginv[alpha, beta]*lowered[beta] for beta in range(self.dim-1)), self.zero())

    def entries(self):
        return [[self.zero() for _ in range(self.dim)] for _ in range(self.dim)]


def _fields(collar):
    if 'fields' not in collar._cache:
        collar._cache['fields'] = _Fields(collar)
    return collar._cache['fields']


def build_A(collar):
    """
    :returns: the leading coefficient diag(mu, ..., mu, lambda+2mu)
    :rtype: L{SymbolMatrix}
    """
    fields = _fields(collar)
    entries = fields.entries()
    for alpha in range(fields.dim-1):
        entries[alpha][alpha] = fields.mu
    entries[-1][-1] = fields.lam2mu
    return SymbolMatrix.from_entries(entries)


def build_d1_d0(collar, gamma=None):
    """
    Symbols of the tangential part of the boundary traction
    :returns: C{(d1, d0)} of degrees 1 and 0
    """
    if gamma is None:
        gamma = christoffel(collar)
    fields = _fields(collar)
    nn = fields.normal
    xi = fields.cotangent
    first = fields.entries()
    zeroth = fields.entries()
    for alpha in range(fields.dim-1):
        first[alpha][nn] = 1j*fields.mu*xi.upper[alpha]
        first[nn][alpha] = 1j*fields.lam*xi.lower[alpha]
        zeroth[nn][alpha] = fields.lam*gamma.trace(alpha)
    zeroth[nn][nn] = fields.lam*gamma.trace(nn)
    return SymbolMatrix.from_entries(first, 1), SymbolMatrix.from_entries(zeroth, 0)


def build_b(collar, gamma=None):
    """
    Symbols of the first-order coefficient B
    :returns: C{(b1, b0)} of degrees 1 and 0
    """
    if gamma is None:
        gamma = christoffel(collar)
    fields = _fields(collar)
    nn = fields.normal
    xi = fields.cotangent
    shear = (fields.lam+fields.mu)*fields.inv_mu
    pressure = (fields.lam+fields.mu)*fields.inv_lam2mu
    first = fields.entries()
    zeroth = fields.entries()
    for alpha in range(fields.dim-1):
        first[alpha][nn] = 1j*shear*xi.upper[alpha]
        first[nn][alpha] = 1j*pressure*xi.lower[alpha]
        for beta in range(fields.dim-1):
            zeroth[alpha][beta] = 2*gamma[alpha, beta, nn]
            if alpha == beta:
                zeroth[alpha][beta] = zeroth[alpha][beta]+gamma.trace(nn)+fields.dmu[nn]*fields.inv_mu
        zeroth[alpha][nn] = fields.grad_lam[alpha]*fields.inv_mu
        zeroth[nn][alpha] = pressure*gamma.trace(alpha)+fields.dmu[alpha]*fields.inv_lam2mu
    zeroth[nn][nn] = gamma.trace(nn)+(fields.dlam[nn]+2*fields.dmu[nn])*fields.inv_lam2mu
    return SymbolMatrix.from_entries(first, 1), SymbolMatrix.from_entries(zeroth, 0)


def build_c(collar, gamma=None):
    """
    Symbols of the zeroth-order coefficient C
    :returns: C{(c2, c1, c0)} of degrees 2, 1 and 0
    """
    if gamma is None:
        gamma = christoffel(collar)
    fields = _fields(collar)
    space = fields.space
    n = fields.dim
    nn = fields.normal
    xi = fields.cotangent
    tangential = range(n-1)
    shear = (fields.lam+fields.mu)*fields.inv_mu
    pressure = (fields.lam+fields.mu)*fields.inv_lam2mu
    trace = [gamma.trace(l) for l in range(n)]

    second = fields.entries()
    for alpha in tangential:
        for beta in tangential:
            second[alpha][beta] = -shear*xi.upper[alpha]*xi.lower[beta]
            if alpha == beta:
                second[alpha][beta] = second[alpha][beta]-xi.square
    second[nn][nn] = -fields.ratio*xi.square

    divergence = _total((xi.upper[alpha]*trace[alpha]+xi.upper[alpha].partial(space.x(alpha))
                         for alpha in tangential), fields.zero())
    along_mu = _total((xi.upper[alpha]*fields.dmu[alpha] for alpha in tangential), fields.zero())

    def turning(upper, lower):
        return _total((xi.upper[gamma_]*gamma[upper, gamma_, lower] for gamma_ in tangential), fields.zero())

    first = fields.entries()
    for alpha in tangential:
        for beta in tangential:
            entry = shear*xi.upper[alpha]*trace[beta]+2*turning(alpha, beta) + \
                (xi.lower[beta]*fields.grad_lam[alpha]+xi.upper[alpha]*fields.dmu[beta])*fields.inv_mu
            if alpha == beta:
                entry = entry+divergence+along_mu*fields.inv_mu
            first[alpha][beta] = 1j*entry
        first[alpha][nn] = 1j*(shear*trace[nn]*xi.upper[alpha]+2*turning(alpha, nn) +
                               fields.dmu[nn]*xi.upper[alpha]*fields.inv_mu)
        first[nn][alpha] = 1j*(2*fields.ratio*turning(nn, alpha)+fields.dlam[nn]*xi.lower[alpha]*fields.inv_lam2mu)
    first[nn][nn] = 1j*(fields.ratio*divergence+along_mu*fields.inv_lam2mu)

    dtrace = [[trace[l].partial(space.x(k)) for l in range(n)] for k in range(n)]
    dgamma = [gamma.partial(space.x(k)) for k in range(n)]
    # laplacian[j][k] = g^{ml} d_k Gamma^j_{ml}
    laplacian = [[_total((fields.ginv[m, l]*dgamma[k][j, m, l] for m in range(n) for l in range(n)), fields.zero())
                  for k in range(n)] for j in range(n)]

    def raised_trace(alpha, l):
        return _total((fields.ginv[alpha, gamma_]*dtrace[gamma_][l] for gamma_ in tangential), fields.zero())

    def metric_drift(alpha, k):
        return _total((fields.dmu[gamma_]*fields.ginv[alpha, gamma_].partial(space.x(k)) for gamma_ in tangential),
                      fields.zero())

    zeroth = fields.entries()
    for alpha in tangential:
        for beta in tangential:
            zeroth[alpha][beta] = shear*raised_trace(alpha, beta)+laplacian[alpha][beta] + \
                (fields.grad_lam[alpha]*trace[beta]-metric_drift(alpha, beta))*fields.inv_mu
        zeroth[alpha][nn] = shear*raised_trace(alpha, nn)+laplacian[alpha][nn] + \
            (fields.grad_lam[alpha]*trace[nn]-metric_drift(alpha, nn))*fields.inv_mu
        zeroth[nn][alpha] = pressure*dtrace[nn][alpha]+fields.ratio*laplacian[nn][alpha] + \
            fields.dlam[nn]*trace[alpha]*fields.inv_lam2mu
    zeroth[nn][nn] = pressure*dtrace[nn][nn]+fields.ratio*laplacian[nn][nn] + \
        fields.dlam[nn]*trace[nn]*fields.inv_lam2mu
    return (SymbolMatrix.from_entries(second, 2), SymbolMatrix.from_entries(first, 1),
            SymbolMatrix.from_entries(zeroth, 0))


class LameSymbols:
    """
    Every symbol needed by the factorization at one collar and covector
    :ivar A: leading coefficient
    :ivar d1: traction symbol of degree 1
    :ivar d0: traction symbol of degree 0
    :ivar b1: degree 1 part of B
    :ivar b0: degree 0 part of B
    :ivar c2: degree 2 part of C
    :ivar c1: degree 1 part of C
    :ivar c0: degree 0 part of C
    :ivar kappa: (lambda+mu)/(lambda+3mu)
    """
    def __init__(self, collar):
        self.collar = collar
        self.space = collar.space
        self.dim = collar.dim
        self.gamma = christoffel(collar)
        self.cotangent = cotangent(collar)
        self.A = build_A(collar)
        self.d1, self.d0 = build_d1_d0(collar, self.gamma)
        self.b1, self.b0 = build_b(collar, self.gamma)
        self.c2, self.c1, self.c0 = build_c(collar, self.gamma)
        self.kappa = (collar.lam+collar.mu)*(collar.lam+3*collar.mu).inverse('lambda+3mu')
        logging.debug(f'Symbols built for n={self.dim} at order {self.space.order}, xi0={collar.xi0}')

    @property
    def xi_norm(self):
        return self.cotangent.norm

    def b(self, degree):
        """
        :returns: the degree part of B, or C{None} if B has none
        """
        return {1: self.b1, 0: self.b0}.get(degree)

    def c(self, degree):
        return {2: self.c2, 1: self.c1, 0: self.c0}.get(degree)

    def d(self, degree):
        return {1: self.d1, 0: self.d0}.get(degree)


def lame_symbols(collar):
    """
    :returns: the symbols of the given collar (computed once per collar)
    :rtype: L{LameSymbols}
    """
    if 'symbols' not in collar._cache:
        collar._cache['symbols'] = LameSymbols(collar)
    return collar._cache['symbols']
