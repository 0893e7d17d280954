"""
Reference displacement-to-traction maps that never use the symbol calculus.

A boundary displacement f e^{i x'.xi} is extended into x_n > 0 as v(x_n) e^{i x'.xi}; with the
traction amplitude s = T_n v' + T_t v the Lame equations become the first-order system
(v, s)' = G (v, s).  The traction on the boundary (outward normal -e_n) is -s, so the DtN matrix
is -Z for the impedance Z = s v^{-1} of the decaying solutions.
"""
import logging
import math

import numpy as np
import scipy.integrate
import scipy.linalg
import scipy.stats

from lamedtn.errors import ConditioningError, IntegrationError, StructureError


class DtNSample:
    """
    DtN matrix of one Fourier mode
    :ivar xi: the covector
    :type xi: numpy.ndarray
    :ivar dtn: n x n complex displacement-to-traction matrix
    :type dtn: numpy.ndarray
    :ivar steps: number of integrator steps (0 for closed-form solutions)
    """
    def __init__(self, xi, dtn, steps=0):
        self.xi = np.asarray(xi, dtype=float)
        self.dtn = np.asarray(dtn, dtype=complex)
        self.steps = steps
        if not np.all(np.isfinite(self.dtn)):
            raise ConditioningError(f'Non-finite DtN entries at xi={self.xi}')

    @property
    def xi_norm(self):
        return float(np.linalg.norm(self.xi))

    def __repr__(self):
        return f'DtNSample(xi={self.xi})\n{self.dtn}'


def _check_covector(xi):
    xi = np.asarray(xi, dtype=float)
    norm = np.linalg.norm(xi)
    if xi.ndim != 1 or not np.isfinite(norm) or norm == 0:
        raise StructureError(f'Covector must be a nonzero finite vector, not {xi}')
    return xi, norm


def system_blocks(lam, mu, xi):
    """
    Blocks of G for constant coefficients at one depth
    :returns: C{(G11, G12, G21, G22)}
    """
    n = len(xi)+1
    nn = n-1
    if mu <= 0 or lam+mu < 0:
        raise StructureError(f'Inadmissible Lame coefficients lambda={lam}, mu={mu}')
    normal = np.diag([mu]*(n-1)+[lam+2*mu]).astype(complex)
    tangential = np.zeros((n, n), dtype=complex)
    tangential[:nn, nn] = 1j*mu*xi
    tangential[nn, :nn] = 1j*lam*xi
    inverse = np.linalg.inv(normal)
    g11 = -inverse @ tangential
    g12 = inverse
    g21 = np.zeros((n, n), dtype=complex)
    g22 = np.zeros((n, n), dtype=complex)
    for beta in range(n-1):
        # sigma_{j beta} = P v + R v'
        plain = np.zeros((n, n), dtype=complex)
        plain[beta, :nn] += 1j*lam*xi
        plain[:nn, beta] += 1j*mu*xi
        plain[range(nn), range(nn)] += 1j*mu*xi[beta]
        plain[nn, nn] = 1j*mu*xi[beta]
        slope = np.zeros((n, n), dtype=complex)
        slope[beta, nn] = lam
        slope[nn, beta] = mu
        g21 -= 1j*xi[beta]*(plain+slope @ g11)
        g22 -= 1j*xi[beta]*(slope @ g12)
    return g11, g12, g21, g22


def decaying_impedance(lam, mu, xi, max_condition=1e12):
    """
    Impedance s v^{-1} of the solutions decaying as x_n grows, from the stable invariant subspace of G
    """
    blocks = system_blocks(lam, mu, xi)
    n = len(xi)+1
    G = np.block([[blocks[0], blocks[1]], [blocks[2], blocks[3]]])
    _, basis, stable = scipy.linalg.schur(G, output='complex', sort='lhp')
    if stable != n:
        raise ConditioningError(f'Expected {n} decaying modes at xi={xi}, found {stable}')
    displacement = basis[:n, :n]
    traction = basis[n:, :n]
    condition = np.linalg.cond(displacement)
    if condition > max_condition:
        raise ConditioningError(f'Decaying basis is rank deficient at xi={xi} (condition {condition:.2e})')
    return np.linalg.solve(displacement.T, traction.T).T


def halfspace_dtn(lam, mu, xi):
    """
    Exact DtN matrix of the homogeneous half-space, computed at the unit covector and scaled by |xi|
    :rtype: L{DtNSample}
    """
    xi, norm = _check_covector(xi)
    return DtNSample(xi, -norm*decaying_impedance(lam, mu, xi/norm))


class LayerProfile:
    """
    Depth-dependent Lame coefficients: polynomials on [0, depth] and constant below
    :ivar depth: thickness L of the graded layer
    """
    def __init__(self, depth, lam, mu):
        if depth <= 0:
            raise StructureError(f'Layer depth must be positive, not {depth}')
        self.depth = float(depth)
        self.lam = np.polynomial.Polynomial(lam)
        self.mu = np.polynomial.Polynomial(mu)
        samples = np.linspace(0., self.depth, 201)
        if np.min(self.mu(samples)) <= 0 or np.min(self.lam(samples)+self.mu(samples)) < 0:
            raise StructureError('Layer profile violates mu > 0 or lambda+mu >= 0')

    def values(self, depth):
        depth = min(max(depth, 0.), self.depth)
        return float(self.lam(depth)), float(self.mu(depth))

    def coefficient_terms(self, dim):
        """
        :returns: C{(lambda terms, mu terms)} as polynomial tables over the n coordinates
        """
        def terms(polynomial):
            return [((0,)*(dim-1)+(power,), float(value)) for power, value in enumerate(polynomial.coef)]
        return terms(self.lam), terms(self.mu)

    def as_dict(self):
        return {'depth': self.depth, 'lam': list(self.lam.coef), 'mu': list(self.mu.coef)}


def layered_dtn(profile, xi, rtol=1e-11, atol=1e-13, method='DOP853'):
    """
    DtN matrix of a layered medium by integrating the impedance Riccati equation
    Z' = G21 + G22 Z - Z G11 - Z G12 Z from the tail depth back to the surface, in the rescaled depth |xi| x_n
    :type profile: L{LayerProfile}
    :rtype: L{DtNSample}
    """
    xi, norm = _check_covector(xi)
    unit = xi/norm
    n = len(xi)+1
    start = decaying_impedance(*profile.values(profile.depth), unit)

    def flow(tau, flat):
        impedance = flat.reshape(n, n)
        g11, g12, g21, g22 = system_blocks(*profile.values(tau/norm), unit)
        return (g21+g22 @ impedance-impedance @ g11-impedance @ g12 @ impedance).ravel()

    solution = scipy.integrate.solve_ivp(flow, (norm*profile.depth, 0.), start.ravel(), method=method, rtol=rtol,
                                         atol=atol)
    if not solution.success:
        raise IntegrationError(norm, solution.message)
    steps = solution.t.size-1
    logging.debug(f'Layered DtN at |xi|={norm:.6g}: {steps} steps, {solution.nfev} evaluations')
    return DtNSample(xi, -norm*solution.y[:, -1].reshape(n, n), steps)


def step_halving_change(profile, xi, rtol=1e-11, atol=1e-13, method='DOP853'):
    """
    :returns: max entrywise change of the layered DtN when both tolerances are halved
    """
    coarse = layered_dtn(profile, xi, rtol, atol, method)
    fine = layered_dtn(profile, xi, rtol/2, atol/2, method)
    return float(np.max(np.abs(coarse.dtn-fine.dtn)))


class DecayFit:
    """
    Log-log regression of errors against |xi|
    :ivar slope: fitted slope (C{-inf} when every error vanishes)
    :ivar interval: 95% confidence interval of the slope
    :type interval: tuple(float)
    """
    def __init__(self, slope, intercept, interval, samples):
        self.slope = slope
        self.intercept = intercept
        self.interval = interval
        self.samples = samples

    @property
    def exact(self):
        return self.slope == -math.inf

    def as_dict(self):
        if self.exact:
            return {'slope': '-inf', 'exact': True, 'samples': self.samples}
        return {'slope': self.slope, 'intercept': self.intercept, 'interval': list(self.interval),
                'exact': False, 'samples': self.samples}

    def __str__(self):
        if self.exact:
            return 'exact agreement'
        return f'slope {self.slope:.3f} [{self.interval[0]:.3f}, {self.interval[1]:.3f}]'


def fit_decay_slope(norms, errors, floor=1e-14, confidence=0.95):
    """
    Least-squares slope of log(error) against log|xi|
    :param floor: errors at or below this value count as exact agreement
    :rtype: L{DecayFit}
    """
    norms = np.asarray(norms, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if norms.shape != errors.shape or norms.size < 5:
        raise ValueError(f'Need at least 5 paired samples, received {norms.size} norms and {errors.size} errors')
    keep = errors > floor
    if np.count_nonzero(keep) < 3:
        return DecayFit(-math.inf, None, (-math.inf, -math.inf), int(norms.size))
    fit = scipy.stats.linregress(np.log(norms[keep]), np.log(errors[keep]))
    spread = scipy.stats.t.ppf((1+confidence)/2, np.count_nonzero(keep)-2)*fit.stderr
    return DecayFit(float(fit.slope), float(fit.intercept), (float(fit.slope-spread), float(fit.slope+spread)),
                    int(norms.size))
