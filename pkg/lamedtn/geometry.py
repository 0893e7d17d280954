"""
Collar data in boundary normal coordinates and the Riemannian quantities derived from the metric.

Index conventions: zero-based, tangential indices 0..n-2, normal index n-1.  Matrices of
jets put the upper index first.
"""
import logging

import numpy as np

from lamedtn.errors import BudgetError, CollarError
from lamedtn.jet import Jet, SymbolMatrix
from lamedtn.jet.series import differentiate, multiply, truncate


class CollarMetric:
    """
    Metric jets g_{alpha beta} on a boundary collar (g_{nn}=1, g_{alpha n}=0 are implied)
    :cvar max_dim: largest supported dimension
    :ivar space: the jet variables
    :type space: L{JetSpace}
    :ivar g_lower: (n-1)x(n-1) nested list of real jets in the spatial variables
    :ivar base_point: the boundary point x0 (last coordinate 0)
    :ivar xi0: the cotangent vector at which symbols are expanded
    :type xi0: numpy.ndarray
    """
    max_dim = 4
    tolerance = 1e-12

    def __init__(self, space, g_lower, base_point=None, xi0=None):
        self.space = space
        self.dim = space.dim
        if self.dim > self.max_dim:
            raise CollarError(f'Dimension {self.dim} exceeds the supported maximum {self.max_dim}')
        if space.order < 2:
            raise BudgetError(2, space.order, 'metric (curvature)')
        self.g_lower = [list(row) for row in g_lower]
        if base_point is None:
            base_point = [0.]*self.dim
        self.base_point = tuple(float(x) for x in base_point)
        if xi0 is None:
            xi0 = [1.]+[0.]*(self.dim-2)
        self.xi0 = np.array(xi0, dtype=float)
        self._cache = {}
        self._validate_metric()

    @property
    def n_vars(self):
        return self.space.n_vars

    @property
    def order(self):
        return self.space.order

    def check_field(self, jet, label):
        """
        Raise L{CollarError} unless C{jet} is a real, xi-independent jet of full order
        """
        if not isinstance(jet, Jet) or jet.n_vars != self.n_vars:
            raise CollarError(f'{label} must be a jet in {self.n_vars} variables')
        if not np.all(np.isfinite(jet.coeffs)):
            raise CollarError(f'{label} has non-finite coefficients')
        if jet.order < self.order:
            raise BudgetError(self.order, jet.order, label)
        if np.max(np.abs(jet.coeffs.imag), initial=0.) > self.tolerance*max(1., jet.max_norm()):
            raise CollarError(f'{label} must be real')
        if not jet.restrict(self.space.cotangent) == jet:
            raise CollarError(f'{label} must not depend on the cotangent variables')

    def _validate_metric(self):
        rows = len(self.g_lower)
        if rows != self.dim-1 or any(len(row) != self.dim-1 for row in self.g_lower):
            raise CollarError(f'Tangential metric must be {self.dim-1}x{self.dim-1}')
        for alpha in range(rows):
            for beta in range(rows):
                self.check_field(self.g_lower[alpha][beta], f'g[{alpha}][{beta}]')
                if beta > alpha and self.g_lower[alpha][beta] != self.g_lower[beta][alpha]:
                    raise CollarError(f'Metric is not symmetric in entries ({alpha},{beta})')
        values = np.array([[entry.value.real for entry in row] for row in self.g_lower])
        if np.min(np.linalg.eigvalsh(values)) <= 0:
            raise CollarError(f'Metric is not positive definite at the base point: {values}')
        if len(self.xi0) != self.dim-1 or not np.all(np.isfinite(self.xi0)):
            raise CollarError(f'Covector {self.xi0} must have {self.dim-1} finite entries')
        if np.linalg.norm(self.xi0) == 0:
            raise CollarError('Covector xi0 must be nonzero')
        if abs(self.base_point[-1]) > 0 or len(self.base_point) != self.dim:
            raise CollarError(f'Base point {self.base_point} must have {self.dim} coordinates and lie on x_n=0')

    def _copy_arguments(self):
        return {'space': self.space, 'g_lower': self.g_lower, 'base_point': self.base_point, 'xi0': self.xi0}

    def with_xi(self, xi0):
        """
        :returns: the same collar expanded at a different covector
        """
        arguments = self._copy_arguments()
        arguments['xi0'] = xi0
        return self.__class__(**arguments)

    def with_coefficients(self, lam, mu):
        """
        :returns: full collar data with the given Lame coefficient jets
        :rtype: L{CollarData}
        """
        return CollarData(self.space, self.g_lower, lam, mu, self.base_point, self.xi0)

    def translate(self, offset):
        """
        Move the base point along the boundary
        :param offset: tangential displacement (n-1 entries)
        """
        shift = list(offset)+[0.]*self.space.dim
        arguments = self._copy_arguments()
        arguments['g_lower'] = [[entry.translate(shift) for entry in row] for row in self.g_lower]
        arguments['base_point'] = tuple(x+dx for x, dx in zip(self.base_point, list(offset)+[0.]))
        for field in ('lam', 'mu'):
            if field in arguments:
                arguments[field] = arguments[field].translate(shift)
        return self.__class__(**arguments)


class CollarData(CollarMetric):
    """
    Metric plus Lame coefficient jets on a boundary collar
    :ivar lam: jet of lambda
    :ivar mu: jet of mu
    """
    def __init__(self, space, g_lower, lam, mu, base_point=None, xi0=None):
        self.lam = lam
        self.mu = mu
        CollarMetric.__init__(self, space, g_lower, base_point, xi0)
        self.check_field(lam, 'lambda')
        self.check_field(mu, 'mu')
        if mu.value.real <= 0:
            raise CollarError(f'mu must be positive at the base point, not {mu.value.real}')
        if (lam+mu).value.real < -self.tolerance:
            raise CollarError(f'lambda+mu must be non-negative at the base point, not {(lam+mu).value.real}')

    def _copy_arguments(self):
        arguments = CollarMetric._copy_arguments(self)
        arguments['lam'] = self.lam
        arguments['mu'] = self.mu
        return arguments

    @property
    def metric(self):
        return CollarMetric(self.space, self.g_lower, self.base_point, self.xi0)


def euclidean_metric(space, xi0=None, base_point=None):
    g_lower = [[space.constant(1. if alpha == beta else 0.) for beta in range(space.dim-1)]
               for alpha in range(space.dim-1)]
    return CollarMetric(space, g_lower, base_point, xi0)


class ChristoffelJets:
    """
    Christoffel symbols Gamma^j_{kl} stored as an (n, n, n, size) coefficient array
    """
    def __init__(self, coeffs, n_vars, order):
        self.coeffs = coeffs
        self.n_vars = n_vars
        self.order = order

    @property
    def dim(self):
        return self.coeffs.shape[0]

    def __getitem__(self, key):
        upper, first, second = key
        return Jet(self.n_vars, self.order, self.coeffs[upper, first, second].copy())

    def partial(self, var):
        return ChristoffelJets(differentiate(self.coeffs, self.n_vars, self.order, var), self.n_vars, self.order-1)

    def trace(self, lower):
        """
        :returns: the tangential trace Gamma^alpha_{alpha l} (summed over alpha < n-1)
        """
        tangential = range(self.dim-1)
        return Jet(self.n_vars, self.order, sum(self.coeffs[alpha, alpha, lower] for alpha in tangential))


def full_metric(collar):
    """
    :returns: the n x n metric g_{jk} with the boundary normal block structure
    :rtype: L{SymbolMatrix}
    """
    space = collar.space
    entries = [[space.zero() for _ in range(space.dim)] for _ in range(space.dim)]
    for alpha in range(space.dim-1):
        for beta in range(space.dim-1):
            entries[alpha][beta] = collar.g_lower[alpha][beta]
    entries[-1][-1] = space.constant(1.)
    return SymbolMatrix.from_entries(entries)


def inverse_metric(collar):
    """
    :returns: g^{jk} as an n x n matrix of jets, with g^{nn}=1 and g^{alpha n}=0
    :rtype: L{SymbolMatrix}
    """
    if 'inverse_metric' not in collar._cache:
        block = SymbolMatrix.from_entries(collar.g_lower).inverse('tangential metric')
        result = SymbolMatrix.zeros(collar.dim, collar.n_vars, block.order)
        result.coeffs[:-1, :-1] = block.coeffs
        result.coeffs[-1, -1, 0] = 1.
        collar._cache['inverse_metric'] = result
    return collar._cache['inverse_metric']


def christoffel(collar):
    """
    Gamma^j_{kl} = g^{jm}(d_l g_{km} + d_k g_{lm} - d_m g_{kl})/2
    :rtype: L{ChristoffelJets}
    """
    if 'christoffel' not in collar._cache:
        space = collar.space
        n = space.dim
        metric = full_metric(collar).coeffs
        order = space.order-1
        derivative = np.stack([differentiate(metric, space.n_vars, space.order, space.x(m)) for m in range(n)])
        # derivative[m, a, b] = d_m g_{ab}; lowered[k, l, m] = d_l g_{km} + d_k g_{lm} - d_m g_{kl}
        lowered = (np.transpose(derivative, (1, 0, 2, 3))+derivative-np.transpose(derivative, (1, 2, 0, 3)))/2
        upper = truncate(inverse_metric(collar).coeffs, space.n_vars, order)
        coeffs = sum(multiply(upper[:, m][:, None, None, :], lowered[None, :, :, m, :], space.n_vars, order)
                     for m in range(n))
        collar._cache['christoffel'] = ChristoffelJets(coeffs, space.n_vars, order)
        logging.debug(f'Christoffel symbols computed at order {order}')
    return collar._cache['christoffel']


def ricci(collar):
    """
    R_{kl} = d_j Gamma^j_{kl} - d_k Gamma^j_{jl} + Gamma^j_{jm} Gamma^m_{kl} - Gamma^j_{km} Gamma^m_{jl}
    :rtype: L{SymbolMatrix}
    """
    if 'ricci' not in collar._cache:
        space = collar.space
        n = space.dim
        gamma = christoffel(collar)
        order = gamma.order-1
        if order < 0:
            raise BudgetError(2, space.order, 'Ricci tensor')
        contracted = sum(gamma.coeffs[j, j] for j in range(n))
        result = sum(differentiate(gamma.coeffs[j], space.n_vars, gamma.order, space.x(j)) for j in range(n))
        result = result-np.stack([differentiate(contracted, space.n_vars, gamma.order, space.x(k)) for k in range(n)])
        result = result+sum(multiply(contracted[m], gamma.coeffs[m], space.n_vars, order) for m in range(n))
        for j in range(n):
            # Gamma^j_{km} Gamma^m_{jl} summed over m
            result = result-sum(multiply(gamma.coeffs[j, :, m][:, None, :], gamma.coeffs[m, j][None, :, :],
                                         space.n_vars, order) for m in range(n))
        collar._cache['ricci'] = SymbolMatrix(result, space.n_vars, order)
    return collar._cache['ricci']


class Cotangent:
    """
    Jets of the covector at the base covector
    :ivar lower: xi_beta
    :ivar upper: xi^alpha = g^{alpha beta} xi_beta
    :ivar square: xi^alpha xi_alpha
    :ivar norm: |xi'|
    """
    def __init__(self, lower, upper, square, norm):
        self.lower = lower
        self.upper = upper
        self.square = square
        self.norm = norm


def cotangent(collar):
    """
    :rtype: L{Cotangent}
    """
    if 'cotangent' not in collar._cache:
        space = collar.space
        ginv = inverse_metric(collar)
        lower = [space.covector(beta, collar.xi0) for beta in range(space.dim-1)]
        upper = [sum((ginv[alpha, beta]*lower[beta] for beta in range(1, space.dim-1)), ginv[alpha, 0]*lower[0])
                 for alpha in range(space.dim-1)]
        square = sum((upper[alpha]*lower[alpha] for alpha in range(1, space.dim-1)), upper[0]*lower[0])
        collar._cache['cotangent'] = Cotangent(lower, upper, square, square.sqrt('|xi|^2'))
    return collar._cache['cotangent']
