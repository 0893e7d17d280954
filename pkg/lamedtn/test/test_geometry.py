import math

import numpy as np
import pytest

from lamedtn.errors import BudgetError, CollarError
from lamedtn.geometry import CollarData, CollarMetric, christoffel, cotangent, euclidean_metric, full_metric, \
    inverse_metric, ricci
from lamedtn.jet import JetSpace, SymbolMatrix

THETA = math.pi/3


def sine_squared_terms(order, theta=THETA):
    """
    Taylor coefficients of sin^2(theta+t) = 1/2 - cos(2 theta) cos(2t)/2 + sin(2 theta) sin(2t)/2
    """
    terms = [((0, 0, 0), 0.5)]
    for power in range(order+1):
        sign = (-1)**(power//2)
        scale = 2**power/math.factorial(power)
        if power % 2 == 0:
            coefficient = -math.cos(2*theta)/2*sign*scale
        else:
            coefficient = math.sin(2*theta)/2*sign*scale
        terms.append(((power, 0, 0), coefficient))
    return terms


def sphere_collar(order=5):
    """
    Unit sphere times a line in coordinates (theta, phi, x_n), expanded at theta = pi/3
    """
    space = JetSpace(3, order)
    metric = [[space.constant(1.), space.zero()], [space.zero(), space.polynomial(sine_squared_terms(order))]]
    return CollarMetric(space, metric, base_point=[THETA, 0., 0.], xi0=[1., 0.5])


def quadratic_collar():
    space = JetSpace(3, 2)
    off_diagonal = space.polynomial([((0, 1, 0), 0.1), ((1, 0, 1), 0.03)])
    metric = [[space.polynomial([((0, 0, 0), 1.), ((1, 0, 0), 0.2), ((0, 0, 1), 0.1), ((1, 0, 1), 0.05),
                                 ((0, 2, 0), -0.04)]), off_diagonal],
              [off_diagonal, space.polynomial([((0, 0, 0), 1.2), ((1, 0, 0), 0.1), ((0, 0, 2), 0.15)])]]
    return CollarMetric(space, metric, xi0=[1., 0.])


def sampled_metric(collar, offset):
    """
    The full metric at an offset from the base point, from the metric jets
    """
    shift = list(offset)+[0.]*(collar.dim-1)
    g = np.eye(collar.dim)
    for alpha in range(collar.dim-1):
        for beta in range(collar.dim-1):
            g[alpha, beta] = collar.g_lower[alpha][beta].translate(shift).value.real
    return g


def finite_difference_curvature(collar, h=1e-3):
    """
    Christoffel symbols and Ricci tensor at the base point from central differences of the sampled metric
    """
    n = collar.dim
    step = np.eye(n)*h
    g = sampled_metric(collar, np.zeros(n))
    # first[m, a, b] = d_m g_ab, second[p, m, a, b] = d_p d_m g_ab
    first = np.array([(sampled_metric(collar, step[m])-sampled_metric(collar, -step[m]))/(2*h) for m in range(n)])
    second = np.array([[(sampled_metric(collar, step[p]+step[m])-sampled_metric(collar, step[p]-step[m]) -
                         sampled_metric(collar, step[m]-step[p])+sampled_metric(collar, -step[p]-step[m]))/(4*h*h)
                        for m in range(n)] for p in range(n)])
    upper = np.linalg.inv(g)
    lowered = 0.5*(np.einsum('kml->mkl', first)+np.einsum('lmk->mkl', first)-first)
    gamma = np.einsum('jm,mkl->jkl', upper, lowered)
    lowered_slope = 0.5*(np.einsum('pkml->pmkl', second)+np.einsum('plmk->pmkl', second)-second)
    upper_slope = -np.einsum('ja,pab,bm->pjm', upper, first, upper)
    slope = np.einsum('pjm,mkl->pjkl', upper_slope, lowered)+np.einsum('jm,pmkl->pjkl', upper, lowered_slope)
    curvature = np.einsum('jjkl->kl', slope)-np.einsum('kjjl->kl', slope) + \
        np.einsum('jjm,mkl->kl', gamma, gamma)-np.einsum('jkm,mjl->kl', gamma, gamma)
    return gamma, curvature


def test_euclidean_flat():
    collar = euclidean_metric(JetSpace(3, 4), [0.3, -1.])
    assert np.abs(christoffel(collar).coeffs).max() == 0
    assert ricci(collar).max_norm() == 0
    assert inverse_metric(collar) == SymbolMatrix.identity(3, 5, 4)


def test_diagonal_inverse():
    space = JetSpace(2, 3)
    collar = CollarMetric(space, [[space.constant(4.)]])
    assert abs(inverse_metric(collar)[0, 0].value-0.25) < 1e-15
    assert inverse_metric(collar)[1, 1].value == 1


def test_finite_difference_curvature():
    collar = quadratic_collar()
    gamma, curvature = finite_difference_curvature(collar)
    exact = christoffel(collar).coeffs[..., 0]
    assert np.max(np.abs(exact-gamma)) < 1e-8, f'Christoffel symbols differ by {np.max(np.abs(exact-gamma))}'
    assert np.max(np.abs(ricci(collar).value()-curvature)) < 1e-8, f'Ricci differs:\n{ricci(collar).value()}\n{curvature}'
    assert np.max(np.abs(curvature)) > 1e-3, 'The sampled metric must be curved'


def test_warped_christoffel():
    space = JetSpace(2, 4)
    collar = CollarMetric(space, [[space.polynomial([((0, 0), 1.), ((0, 1), 2.), ((0, 2), 1.)])]])
    gamma = christoffel(collar)
    stretch = space.polynomial([((0, 0), 1.), ((0, 1), 1.)])
    assert (gamma[0, 0, 1]-stretch.inverse()).max_norm() < 1e-12, 'Gamma^1_{1n} = 1/(1+x_n)'
    assert (gamma[1, 0, 0]+stretch).max_norm() < 1e-12, 'Gamma^n_{11} = -(1+x_n)'
    identity = inverse_metric(collar)[0, 0]*gamma[1, 0, 0]+gamma[0, 1, 0]
    assert identity.max_norm() < 1e-12
    assert gamma[1, 1, 0].max_norm() == 0 and gamma[0, 1, 1].max_norm() == 0


def test_sphere_christoffel():
    gamma = christoffel(sphere_collar())
    expected = -math.sin(THETA)*math.cos(THETA)
    assert abs(gamma[0, 1, 1].value-expected) < 1e-12, f'Gamma^theta_phiphi = {gamma[0, 1, 1].value}, expected {expected}'
    assert abs(gamma[1, 0, 1].value-1/math.tan(THETA)) < 1e-12
    assert abs(gamma[1, 1, 0].value-1/math.tan(THETA)) < 1e-12
    assert gamma.trace(2).max_norm() == 0
    for upper in range(3):
        for lower in range(3):
            assert gamma[2, upper, lower].max_norm() == 0, 'The normal line is flat'


def test_sphere_ricci():
    collar = sphere_collar()
    curvature = ricci(collar)
    assert curvature.order == collar.order-2
    expected = full_metric(collar)
    expected.coeffs[2, 2, 0] = 0.
    distance = curvature.distance(expected)
    assert distance < 1e-10, f'Ricci of S^2 x R differs from the sphere metric by {distance}'
    assert abs(curvature.value()[1, 1]-0.75) < 1e-12


def test_cotangent_norm():
    space = JetSpace(3, 3)
    xi = cotangent(euclidean_metric(space, [3., 4.]))
    assert abs(xi.norm.value-5) < 1e-14
    assert abs(xi.square.value-25) < 1e-13
    assert abs(xi.norm.partial(space.xi(0)).value-0.6) < 1e-14
    metric = CollarMetric(JetSpace(2, 3), [[JetSpace(2, 3).constant(4.)]], xi0=[2.])
    assert abs(cotangent(metric).upper[0].value-0.5) < 1e-15
    assert abs(cotangent(metric).norm.value-1) < 1e-15


def test_metric_validation():
    space = JetSpace(3, 3)
    one, zero = space.constant(1.), space.zero()
    with pytest.raises(CollarError):
        CollarMetric(space, [[one, space.coordinate(0)], [zero, one]])
    with pytest.raises(CollarError):
        CollarMetric(space, [[one, zero], [zero, space.constant(-1.)]])
    with pytest.raises(CollarError):
        CollarMetric(space, [[one, zero], [zero, one]], xi0=[0., 0.])
    with pytest.raises(CollarError):
        CollarMetric(space, [[one, zero], [zero, one]], base_point=[0., 0., 1.])
    with pytest.raises(CollarError):
        CollarMetric(space, [[one, zero], [zero, one + 1j*space.coordinate(0)]])
    with pytest.raises(CollarError):
        CollarMetric(space, [[one, zero], [zero, one + 0.1*space.covector(0, [1., 0.])]])
    with pytest.raises(BudgetError):
        euclidean_metric(JetSpace(2, 1))


def test_coefficient_validation():
    space = JetSpace(2, 3)
    metric = [[space.constant(1.)]]
    with pytest.raises(CollarError):
        CollarData(space, metric, space.constant(1.), space.constant(0.))
    with pytest.raises(CollarError):
        CollarData(space, metric, space.constant(-2.), space.constant(1.))
    boundary = CollarData(space, metric, space.constant(-1.), space.constant(1.))
    assert boundary.lam.value == -1


def test_translate_collar():
    space = JetSpace(3, 4)
    collar = sphere_collar(4).with_coefficients(space.constant(1.)+space.coordinate(0), space.constant(2.))
    moved = collar.translate([0.1, 0.])
    assert moved.base_point == pytest.approx((THETA+0.1, 0., 0.))
    assert abs(moved.lam.value-1.1) < 1e-14
    assert abs(moved.g_lower[1][1].value-math.sin(THETA+0.1)**2) < 1e-5
    assert np.allclose(moved.with_xi([2., 0.]).xi0, [2., 0.])
