"""
Full symbol of the elastic Dirichlet-to-Neumann map and the oracle interface serving it
"""
import logging

import numpy as np

from lamedtn.factorization import SymbolExpansion, full_expansion_q
from lamedtn.geometry import cotangent, full_metric
from lamedtn.jet import SymbolMatrix
from lamedtn.symbols import lame_symbols


def assemble_p(q, collar):
    """
    p_1 = A q_1 - d_1, p_0 = A q_0 - d_0, p_{-m} = A q_{-m}
    :type q: L{SymbolExpansion}
    :rtype: L{SymbolExpansion}
    """
    symbols = lame_symbols(collar)
    result = SymbolExpansion(kind='p')
    for term in q:
        value = symbols.A @ term
        traction = symbols.d(term.degree)
        if traction is not None:
            value = value-traction
        result.append(value)
    result.residuals = dict(q.residuals)
    result.cross_checks = dict(q.cross_checks)
    return result


def direct_p1(collar):
    """
    Principal symbol of the DtN map written out explicitly
    :rtype: L{SymbolMatrix}
    """
    xi = cotangent(collar)
    lam, mu = collar.lam, collar.mu
    norm = xi.norm
    coupling = (lam+3*mu).inverse('lambda+3mu')
    n = collar.dim
    nn = n-1
    zero = collar.space.zero()
    entries = [[zero for _ in range(n)] for _ in range(n)]
    for alpha in range(n-1):
        for beta in range(n-1):
            entries[alpha][beta] = mu*(lam+mu)*coupling*norm.inverse('|xi|')*xi.upper[alpha]*xi.lower[beta]
            if alpha == beta:
                entries[alpha][beta] = entries[alpha][beta]+mu*norm
        entries[alpha][nn] = -2j*mu*mu*coupling*xi.upper[alpha]
        entries[nn][alpha] = 2j*mu*mu*coupling*xi.lower[alpha]
    entries[nn][nn] = 2*mu*(lam+2*mu)*coupling*norm
    return SymbolMatrix.from_entries(entries, 1)


def lowered_principal(p1, collar):
    """
    :returns: G p_1 at the base point with G = diag(g_{alpha beta}, 1); a Hermitian positive definite matrix
    :rtype: numpy.ndarray
    """
    return full_metric(collar).value() @ p1.value()


class DtNSymbolOracle:
    """
    Source of DtN symbol terms p_j at a boundary point, as jets in the tangential and cotangent variables
    :ivar depth: number of terms available (degrees 1 down to 2-depth)
    """
    def __init__(self, space, depth):
        self.space = space
        self.depth = depth

    def query(self, degree, xi=None, shift=None):
        """
        :param degree: the symbol degree j (1 >= j > 1-depth)
        :param xi: covector (default: the oracle's base covector)
        :param shift: tangential displacement of the boundary point
        :rtype: L{SymbolMatrix}
        """
        raise NotImplementedError


class GroundTruthOracle(DtNSymbolOracle):
    """
    Synthetic oracle that runs the forward pipeline on known collar data
    """
    def __init__(self, collar, depth):
        DtNSymbolOracle.__init__(self, collar.space, depth)
        self.collar = collar
        self._expansions = {}

    def expansion(self, xi=None, shift=None):
        xi = self.collar.xi0 if xi is None else np.asarray(xi, dtype=float)
        shift = np.zeros(self.space.dim-1) if shift is None else np.asarray(shift, dtype=float)
        key = (tuple(xi), tuple(shift))
        if key not in self._expansions:
            collar = self.collar.with_xi(xi)
            if np.any(shift != 0):
                collar = collar.translate(shift)
            logging.debug(f'Oracle expansion at xi={xi}, shift={shift}')
            self._expansions[key] = assemble_p(full_expansion_q(collar, self.depth), collar)
        return self._expansions[key]

    def query(self, degree, xi=None, shift=None):
        return self.expansion(xi, shift)[degree].restrict([self.space.normal])


def oracle_from_groundtruth(collar, depth):
    """
    :rtype: L{GroundTruthOracle}
    """
    return GroundTruthOracle(collar, depth)
