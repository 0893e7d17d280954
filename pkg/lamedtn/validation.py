"""
Comparisons between the symbol expansion and the reference solvers
"""
import logging
import math

import numpy as np

from lamedtn.dtn import assemble_p, direct_p1, lowered_principal
from lamedtn.factorization import euler_defect, full_expansion_q, full_symbol_residual
from lamedtn.geometry import euclidean_metric
from lamedtn.jet import JetSpace
from lamedtn.reference import fit_decay_slope, halfspace_dtn, layered_dtn, step_halving_change
from lamedtn.samples import constant_euclidean_collar
from lamedtn.symbols import lame_symbols


def halfspace_error(lam, mu, xi):
    """
    :returns: max entrywise difference between the exact half-space DtN and the principal symbol at C{xi}
    """
    xi = np.asarray(xi, dtype=float)
    sample = halfspace_dtn(lam, mu, xi)
    symbol = direct_p1(constant_euclidean_collar(len(xi)+1, 3, lam, mu, xi)).value()
    return float(np.max(np.abs(sample.dtn-symbol)))


def halfspace_agreement(pairs, covectors, tolerance=1e-10):
    """
    :param pairs: iterable of constant C{(lambda, mu)}
    :param covectors: iterable of covectors
    :returns: C{(max error, passed)}
    """
    worst = 0.
    for lam, mu in pairs:
        for xi in covectors:
            worst = max(worst, halfspace_error(lam, mu, xi))
    logging.info(f'Half-space agreement: max error {worst:.2e}')
    return worst, worst <= tolerance


def profile_symbols(profile, dim, direction, depth=3):
    """
    Values p_1, p_0, ... at the unit covector for a layered profile
    :returns: list of C{(degree, matrix)}
    """
    direction = np.asarray(direction, dtype=float)
    direction = direction/np.linalg.norm(direction)
    space = JetSpace(dim, max(depth+2, len(profile.lam.coef), len(profile.mu.coef)))
    lam_terms, mu_terms = profile.coefficient_terms(dim)
    collar = euclidean_metric(space, direction).with_coefficients(space.polynomial(lam_terms),
                                                                  space.polynomial(mu_terms))
    p = assemble_p(full_expansion_q(collar, depth), collar)
    return [(term.degree, term.value()) for term in p]


class RemainderRow:
    """
    Truncation errors of the symbol expansion at one |xi|
    :ivar absolute: norm of DtN minus the partial sums through p_1, p_0, p_-1
    :ivar relative: the same divided by the norm of the DtN
    """
    def __init__(self, xi_norm, absolute, relative, steps):
        self.xi_norm = xi_norm
        self.absolute = absolute
        self.relative = relative
        self.steps = steps


def remainder_row(profile, direction, xi_norm, terms, rtol=1e-11, atol=1e-13, method='DOP853'):
    """
    :param terms: output of L{profile_symbols}, scaled here by homogeneity
    :rtype: L{RemainderRow}
    """
    direction = np.asarray(direction, dtype=float)
    direction = direction/np.linalg.norm(direction)
    sample = layered_dtn(profile, xi_norm*direction, rtol, atol, method)
    total = np.zeros_like(sample.dtn)
    absolute = []
    for degree, value in terms:
        total = total+value*xi_norm**degree
        absolute.append(float(np.linalg.norm(sample.dtn-total)))
    scale = float(np.linalg.norm(sample.dtn))
    return RemainderRow(xi_norm, absolute, [error/scale for error in absolute], sample.steps)


def remainder_table(profile, dim, direction, xi_norms, depth=3, mapper=map, rtol=1e-11, atol=1e-13,
                    method='DOP853'):
    """
    Layered DtN against partial sums of the symbol expansion over a frequency grid
    :param mapper: C{map}-like callable used to evaluate the grid (e.g., a process pool's)
    :returns: C{(rows, absolute fits, relative fits)}, one fit per number of terms
    """
    terms = profile_symbols(profile, dim, direction, depth)
    rows = list(mapper(_RowTask(profile, direction, terms, rtol, atol, method), xi_norms))
    absolute = [fit_decay_slope([row.xi_norm for row in rows], [row.absolute[j] for row in rows])
                for j in range(depth)]
    relative = [fit_decay_slope([row.xi_norm for row in rows], [row.relative[j] for row in rows])
                for j in range(depth)]
    for j in range(depth):
        logging.info(f'Through degree {1-j}: absolute {absolute[j]}, relative {relative[j]}')
    return rows, absolute, relative


class _RowTask:
    """
    Picklable closure over one remainder experiment
    """
    def __init__(self, profile, direction, terms, rtol, atol, method):
        self.profile = profile
        self.direction = direction
        self.terms = terms
        self.rtol = rtol
        self.atol = atol
        self.method = method

    def __call__(self, xi_norm):
        return remainder_row(self.profile, self.direction, xi_norm, self.terms, self.rtol, self.atol, self.method)


def halving_check(profile, direction, xi_norm, rtol=1e-11, atol=1e-13, method='DOP853'):
    direction = np.asarray(direction, dtype=float)
    return step_halving_change(profile, xi_norm*direction/np.linalg.norm(direction), rtol, atol, method)


def symbol_diagnostics(collar, depth):
    """
    Forward pipeline on one collar together with every structural check on its output
    :returns: C{(q, p, diagnostics)} where the diagnostics are floats keyed by check name
    """
    symbols = lame_symbols(collar)
    q = full_expansion_q(collar, depth, cross_check=True)
    p = assemble_p(q, collar)
    lowered = lowered_principal(p[1], collar)
    scale = max(p[1].max_norm(), 1.)
    diagnostics = {'principal_identity': full_symbol_residual(q, symbols, 2),
                   'sylvester': max(q.residuals.values(), default=0.),
                   'cross_check': max(q.cross_checks.values(), default=0.),
                   'full_symbol': {degree: full_symbol_residual(q, symbols, degree)
                                   for degree in range(1, q.lowest, -1)},
                   'two_route': direct_p1(collar).distance(p[1])/scale,
                   'hermitian': float(np.max(np.abs(lowered-lowered.conj().T)))/scale,
                   'min_eigenvalue': float(np.min(np.linalg.eigvalsh((lowered+lowered.conj().T)/2))),
                   'homogeneity': max(euler_defect(term, symbols) for term in p)}
    return q, p, diagnostics


def scaling_defect(collar, depth, factors=(2., 0.5)):
    """
    Re-expand at s xi0 and compare each p_j with s^j times its value at xi0
    :returns: worst defect relative to the size of the term
    """
    p = assemble_p(full_expansion_q(collar, depth), collar)
    worst = 0.
    for factor in factors:
        scaled = collar.with_xi(factor*np.asarray(collar.xi0))
        other = assemble_p(full_expansion_q(scaled, depth), scaled)
        for term in p:
            expected = term.value()*factor**term.degree
            error = np.max(np.abs(other[term.degree].value()-expected))
            worst = max(worst, float(error)/max(float(np.max(np.abs(expected))), 1.))
    return worst


def true_normal_derivatives(collar, m_max):
    """
    :returns: C{(lambda values, mu values)} of d_n^k for k = 0..m_max at the base point
    """
    space = collar.space
    values = ([], [])
    for k in range(m_max+1):
        index = [0]*space.n_vars
        index[space.normal] = k
        values[0].append(float(collar.lam.derivative(index).real))
        values[1].append(float(collar.mu.derivative(index).real))
    return values


def recovery_errors(recovery, truth):
    """
    Relative error of every recovered value against the truth (scaled by max(|truth|, 1))
    :returns: the worst error, or C{inf} when orders are missing
    """
    lam, mu = recovery.values()
    if len(lam) < len(truth[0]):
        return math.inf
    return max(abs(found-expected)/max(abs(expected), 1.)
               for found_values, expected_values in zip((lam, mu), truth)
               for found, expected in zip(found_values, expected_values))
