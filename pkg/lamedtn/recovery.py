"""
Boundary determination of the Lame coefficients from the DtN symbol.

Order 0 reads lambda and mu off the principal symbol.  Every higher normal derivative is found by
affine probing: the forward pipeline is run with the unknown pair (d_n^k lambda, d_n^k mu) set to
(0,0), (s,0) and (0,s) while everything already recovered stays pinned, and the implied E-term is
matched against the one computed from the oracle's data in the least-squares sense.
"""
import logging
import math

import numpy as np

from lamedtn.dtn import assemble_p
from lamedtn.errors import BudgetError, DataInconsistencyError, LameError, SingularityError
from lamedtn.factorization import full_expansion_q, principal_q
from lamedtn.geometry import cotangent
from lamedtn.symbols import lame_symbols


class BoundaryRecovery:
    """
    Normal derivatives of lambda and mu recovered at one boundary point
    :ivar lam_derivs: d_n^k lambda for k = 0, 1, ..., each a jet in the tangential variables
    :type lam_derivs: list(L{Jet})
    :ivar mu_derivs: d_n^k mu
    :ivar residuals: relative fit residual of each order
    :ivar conditioning: condition number of each order's linear system (C{None} for order 0)
    :ivar disagreements: distance between the column-only and row-only solutions of each order
    :ivar failed_order: first order that could not be recovered, if any
    """
    def __init__(self, xi):
        self.xi = np.asarray(xi, dtype=float)
        self.lam_derivs = []
        self.mu_derivs = []
        self.residuals = []
        self.conditioning = []
        self.disagreements = []
        self.warnings = []
        self.failed_order = None
        self.error = None

    @property
    def orders(self):
        return len(self.lam_derivs)

    def values(self):
        """
        :returns: C{(lambda values, mu values)} at the base point, one per recovered order
        """
        return [jet.value.real for jet in self.lam_derivs], [jet.value.real for jet in self.mu_derivs]

    def __str__(self):
        lam, mu = self.values()
        lines = [f'Recovery at xi={self.xi}:']
        for k in range(self.orders):
            lines.append(f'\td_n^{k}: lambda={lam[k]:.12g}, mu={mu[k]:.12g}, residual={self.residuals[k]:.2e}')
        if self.failed_order is not None:
            lines.append(f'\tfailed at order {self.failed_order}: {self.error}')
        return '\n'.join(lines)


def _frozen_variables(space):
    return [space.normal]+space.cotangent


def _boundary_metric(metric, xi):
    """
    The metric-only part of a collar, expanded at the covector C{xi}
    """
    metric = getattr(metric, 'metric', metric)
    return metric.with_xi(np.asarray(xi, dtype=float))


def recover_order0(oracle, metric, xi=None):
    """
    lambda and mu with their tangential jets from p_1: (p_1)^n_beta = i f1 xi_beta and (p_1)^n_n = f2 |xi|,
    mu = (f1+f2)/2 and lambda = mu (f2/f1 - 2)
    :returns: C{(lambda, mu, residual)}
    """
    if xi is None:
        xi = metric.xi0
    xi = np.asarray(xi, dtype=float)
    metric = _boundary_metric(metric, xi)
    space = metric.space
    frozen = _frozen_variables(space)
    nn = space.dim-1
    p1 = oracle.query(1, xi).restrict(frozen)
    shear = sum((p1[nn, beta]*(-1j*xi[beta]) for beta in range(space.dim-1)), space.zero())*(1/float(xi @ xi))
    pressure = p1[nn, nn]*cotangent(metric).norm.restrict(frozen).inverse('|xi|')
    if shear.value.real <= 0 or pressure.value.real <= 0:
        raise DataInconsistencyError(f'Principal symbol gives f1={shear.value:.6g}, f2={pressure.value:.6g}; '
                                     f'both must be positive')
    mu = ((shear+pressure)*0.5).real
    lam = (mu*(pressure*shear.inverse('f1')-2)).real
    if (lam+mu).value.real < -1e-10*abs(mu.value):
        raise DataInconsistencyError(f'Recovered lambda+mu={(lam+mu).value.real:.6g} is negative')
    collar = metric.with_coefficients(lam, mu)
    model = assemble_p(full_expansion_q(collar, 1), collar)[1].restrict(frozen)
    residual = model.distance(p1)/max(p1.max_norm(), 1.)
    logging.info(f'Order 0: lambda={lam.value.real:.10g}, mu={mu.value.real:.10g}, residual={residual:.2e}')
    return lam, mu, residual


def pinned_coefficient(space, derivatives, k, top=0.):
    """
    Jet whose normal slices 0..k-1 hold the given normal derivatives and whose slice k holds C{top}/k!
    """
    jet = space.zero()
    for power, derivative in enumerate(derivatives[:k]):
        jet = jet.with_power_slice(space.normal, power, derivative*(1/math.factorial(power)))
    if top:
        jet = jet.with_power_slice(space.normal, k, space.constant(top/math.factorial(k), space.order-k))
    return jet


class _Probe:
    """
    Forward pipeline with the order-k unknowns set to constants
    """
    def __init__(self, metric, lam_derivs, mu_derivs, k):
        if metric.order < k+3:
            raise BudgetError(k+3, metric.order, f'order {k} recovery')
        self.metric = metric
        self.space = metric.space
        self.lam_derivs = lam_derivs
        self.mu_derivs = mu_derivs
        self.k = k
        self.frozen = _frozen_variables(self.space)
        reference = self.collar(0., 0.)
        symbols = lame_symbols(reference)
        self.inverse_A = symbols.A.restrict(self.frozen).inverse('A')
        self.d0 = symbols.d0.restrict(self.frozen) if k == 1 else None
        q1 = principal_q(reference).restrict(self.frozen)
        self.left = q1-symbols.b1.restrict(self.frozen)
        self.right = q1

    def collar(self, lam_top, mu_top):
        lam = pinned_coefficient(self.space, self.lam_derivs, self.k, lam_top)
        mu = pinned_coefficient(self.space, self.mu_derivs, self.k, mu_top)
        return self.metric.with_coefficients(lam, mu)

    def implied_E(self, p):
        """
        E_{2-k} = (q_1-b_1) q_{1-k} + q_{1-k} q_1 with q_{1-k} recovered from p_{1-k}
        """
        p = p.restrict(self.frozen)
        if self.d0 is not None:
            p = p+self.d0
        q = self.inverse_A @ p
        return self.left @ q+q @ self.right

    def __call__(self, lam_top, mu_top):
        collar = self.collar(lam_top, mu_top)
        expansion = assemble_p(full_expansion_q(collar, self.k+1), collar)
        return self.implied_E(expansion[1-self.k])


def _observed(E, dim):
    """
    Observation entries: (alpha,n) for every alpha, then (n,beta) for every beta, then (n,n)
    """
    nn = dim-1
    return [E[alpha, nn] for alpha in range(dim-1)]+[E[nn, beta] for beta in range(dim-1)]+[E[nn, nn]]


def _least_squares(lam_response, mu_response, target):
    """
    Pointwise (jet-valued) least-squares solution of lam_response u + mu_response v = target
    """
    zero = target[0]*0
    normal11 = sum((a.conjugate()*a for a in lam_response), zero)
    normal12 = sum((a.conjugate()*b for a, b in zip(lam_response, mu_response)), zero)
    normal22 = sum((b.conjugate()*b for b in mu_response), zero)
    right1 = sum((a.conjugate()*t for a, t in zip(lam_response, target)), zero)
    right2 = sum((b.conjugate()*t for b, t in zip(mu_response, target)), zero)
    inverse = (normal11*normal22-normal12*normal12.conjugate()).inverse('normal equations')
    lam = (normal22*right1-normal12*right2)*inverse
    mu = (normal11*right2-normal12.conjugate()*right1)*inverse
    return lam.real, mu.real


def recover_normal_derivs(oracle, metric, lam_derivs, mu_derivs, k, xi=None, probe_scale=1., tolerance=1e-7):
    """
    d_n^k lambda and d_n^k mu (with tangential jets) by affine probing
    :param lam_derivs: recovered d_n^j lambda for j < k
    :param probe_scale: size of the probing perturbation
    :returns: C{(lambda_k, mu_k, residual, condition, disagreement)}
    """
    if k < 1:
        raise ValueError(f'Normal derivative order must be positive, not {k}')
    if len(lam_derivs) < k or len(mu_derivs) < k:
        raise BudgetError(k, min(len(lam_derivs), len(mu_derivs)), 'recovered orders')
    if xi is None:
        xi = metric.xi0
    metric = _boundary_metric(metric, xi)
    probe = _Probe(metric, lam_derivs, mu_derivs, k)
    dim = metric.dim
    observed = _observed(probe.implied_E(oracle.query(1-k, xi)), dim)
    baseline = _observed(probe(0., 0.), dim)
    lam_response = [(entry-base)*(1/probe_scale) for entry, base in zip(_observed(probe(probe_scale, 0.), dim), baseline)]
    mu_response = [(entry-base)*(1/probe_scale) for entry, base in zip(_observed(probe(0., probe_scale), dim), baseline)]
    target = [entry-base for entry, base in zip(observed, baseline)]
    system = np.array([[a.value, b.value] for a, b in zip(lam_response, mu_response)])
    condition = float(np.linalg.cond(system))
    lam, mu = _least_squares(lam_response, mu_response, target)
    scale = max(max(entry.max_norm() for entry in observed), 1.)
    residual = max((t-a*lam-b*mu).max_norm() for a, b, t in zip(lam_response, mu_response, target))/scale
    if residual > tolerance:
        raise DataInconsistencyError(f'Order {k} observations are inconsistent (relative residual {residual:.2e})')
    split = {}
    for entries, chosen in (('column', list(range(dim-1))+[2*dim-2]), ('row', list(range(dim-1, 2*dim-1)))):
        try:
            split[entries] = _least_squares([lam_response[i] for i in chosen], [mu_response[i] for i in chosen],
                                            [target[i] for i in chosen])
        except SingularityError:
            split[entries] = None
    if split['column'] is None or split['row'] is None:
        disagreement = None
    else:
        disagreement = max((split['column'][0]-split['row'][0]).max_norm(),
                           (split['column'][1]-split['row'][1]).max_norm())
    logging.info(f'Order {k}: d_n^{k} lambda={lam.value.real:.10g}, d_n^{k} mu={mu.value.real:.10g}, '
                 f'residual={residual:.2e}, condition={condition:.2e}')
    return lam, mu, residual, condition, disagreement


def recover_all(oracle, metric, m_max, xi=None, probe_scale=1., tolerance=1e-7, max_condition=1e10):
    """
    Orders 0..m_max in sequence; a failure keeps the orders already recovered
    :rtype: L{BoundaryRecovery}
    """
    if oracle.depth < m_max+1:
        raise BudgetError(m_max+1, oracle.depth, 'oracle depth')
    if xi is None:
        xi = metric.xi0
    result = BoundaryRecovery(xi)
    order = 0
    try:
        lam, mu, residual = recover_order0(oracle, metric, xi)
        result.lam_derivs.append(lam)
        result.mu_derivs.append(mu)
        result.residuals.append(residual)
        result.conditioning.append(None)
        result.disagreements.append(None)
        for order in range(1, m_max+1):
            lam, mu, residual, condition, disagreement = \
                recover_normal_derivs(oracle, metric, result.lam_derivs, result.mu_derivs, order, xi, probe_scale,
                                      tolerance)
            if condition > max_condition:
                message = f'Order {order} system has condition number {condition:.2e}'
                logging.warning(message)
                result.warnings.append(message)
            result.lam_derivs.append(lam)
            result.mu_derivs.append(mu)
            result.residuals.append(residual)
            result.conditioning.append(condition)
            result.disagreements.append(disagreement)
    except LameError as error:
        logging.warning(f'Recovery stopped at order {order}: {error}')
        result.failed_order = order
        result.error = str(error)
    return result


def normal_coefficients(lam, mu):
    """
    Coefficients of (d_n lambda, d_n mu) in the (alpha,n) entry of E_1 divided by i xi^alpha (first row) and in
    its (n,n) entry divided by |xi| (second row)
    :rtype: numpy.ndarray
    """
    shift = (lam+3*mu)**2
    return np.array([[2*mu/shift, -2*(2*lam+3*mu)/shift],
                     [2*mu**2/((lam+2*mu)*shift), 2*(lam**2+4*lam*mu+6*mu**2)/((lam+2*mu)*shift)]])


def normal_determinant(lam, mu):
    """
    det [[mu, -(2lambda+3mu)], [mu^2, lambda^2+4 lambda mu+6mu^2]] = mu (lambda+3mu)^2
    """
    return float(np.linalg.det(np.array([[mu, -(2*lam+3*mu)], [mu**2, lam**2+4*lam*mu+6*mu**2]], dtype=float)))


def normal_sensitivity(metric, lam_derivs, mu_derivs, k, xi=None, probe_scale=1.):
    """
    Measured sensitivity of d_n^{k-1} E_1 to (d_n^k lambda, d_n^k mu) at the base point: the order-k probe
    response lifted k-1 times through X -> (q_1-b_1) X + X q_1
    :returns: 2x2 matrix comparable with L{normal_coefficients}
    :rtype: numpy.ndarray
    """
    if xi is None:
        xi = metric.xi0
    metric = _boundary_metric(metric, xi)
    probe = _Probe(metric, lam_derivs, mu_derivs, k)
    baseline = probe(0., 0.).value()
    left, right = probe.left.value(), probe.right.value()
    xi_data = cotangent(metric)
    upper = np.array([jet.value for jet in xi_data.upper])
    norm = xi_data.norm.value.real
    nn = metric.dim-1
    result = np.zeros((2, 2))
    for column, top in enumerate(((probe_scale, 0.), (0., probe_scale))):
        response = (probe(*top).value()-baseline)/probe_scale
        for _ in range(k-1):
            response = left @ response+response @ right
        weights = 1j*upper
        result[0, column] = (np.vdot(weights, response[:nn, nn])/np.vdot(weights, weights)).real
        result[1, column] = (response[nn, nn]/norm).real
    return result
