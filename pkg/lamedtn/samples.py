"""
Generators of admissible collar data for experiments and tests
"""
import numpy as np

from lamedtn.geometry import CollarData, euclidean_metric
from lamedtn.jet import JetSpace
from lamedtn.jet.multiindex import multi_indices


def _random_terms(rng, dim, degree, scale, constant=0.):
    """
    Polynomial table with random coefficients of total degree 1..degree (plus a fixed constant)
    """
    terms = [((0,)*dim, constant)]
    for index in multi_indices(dim, degree)[1:]:
        terms.append((index, scale*rng.uniform(-1., 1.)))
    return terms


def random_metric_terms(rng, dim, degree=2, scale=0.1):
    """
    Symmetric (n-1)x(n-1) table of polynomial entries, positive definite at the base point
    """
    size = dim-1
    root = rng.uniform(-0.3, 0.3, (size, size))
    base = np.eye(size)+root @ root.T
    table = [[None]*size for _ in range(size)]
    for alpha in range(size):
        for beta in range(alpha, size):
            table[alpha][beta] = table[beta][alpha] = _random_terms(rng, dim, degree, scale, base[alpha, beta])
    return table


def random_coefficient_terms(rng, dim, degree=3, scale=0.2):
    """
    Polynomial tables for lambda and mu with mu0 in [0.5, 2] and lambda0 + mu0 >= 0.1
    """
    mu0 = rng.uniform(0.5, 2.)
    lam0 = rng.uniform(-mu0+0.1, 3.)
    return _random_terms(rng, dim, degree, scale, lam0), _random_terms(rng, dim, degree, scale*mu0/2, mu0)


def random_covector(rng, dim):
    while True:
        xi = rng.uniform(-1., 1., dim-1)
        if np.linalg.norm(xi) > 0.2:
            return xi


def random_collar(rng, dim, order, metric_degree=2, coefficient_degree=3):
    """
    Random admissible collar: analytic metric perturbation of a random SPD matrix, polynomial lambda and mu
    :type rng: numpy.random.Generator
    :rtype: L{CollarData}
    """
    space = JetSpace(dim, order)
    metric = [[space.polynomial(entry) for entry in row] for row in random_metric_terms(rng, dim, metric_degree)]
    lam, mu = random_coefficient_terms(rng, dim, coefficient_degree)
    return CollarData(space, metric, space.polynomial(lam), space.polynomial(mu), xi0=random_covector(rng, dim))


def constant_euclidean_collar(dim, order, lam, mu, xi=None):
    space = JetSpace(dim, order)
    return euclidean_metric(space, xi).with_coefficients(space.constant(lam), space.constant(mu))
