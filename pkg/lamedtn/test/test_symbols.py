import numpy as np
import pytest

from lamedtn.geometry import CollarData, CollarMetric
from lamedtn.jet import JetSpace
from lamedtn.jet.multiindex import multi_indices
from lamedtn.operator import apply_factored, apply_lame, apply_lame_bochner, field_distance, field_scale, \
    laplace_beltrami, polynomial_field
from lamedtn.samples import constant_euclidean_collar, random_collar
from lamedtn.symbols import lame_symbols
from lamedtn.validation import scaling_defect


def graded_collar(order=4):
    """
    Euclidean half-plane with lambda = 1 + x_n and mu = 1
    """
    space = JetSpace(2, order)
    lam = space.polynomial([((0, 0), 1.), ((0, 1), 1.)])
    return CollarData(space, [[space.constant(1.)]], lam, space.constant(1.), xi0=[1.])


def random_field(rng, space, degree=3):
    return polynomial_field(space, [[(index, rng.uniform(-1., 1.)) for index in multi_indices(space.dim, degree)]
                                    for _ in range(space.dim)])


def test_leading_coefficient():
    symbols = lame_symbols(constant_euclidean_collar(3, 3, 1., 1.))
    assert np.allclose(symbols.A.value(), np.diag([1., 1., 3.]))
    symbols = lame_symbols(constant_euclidean_collar(2, 3, 0., 2.))
    assert np.allclose(symbols.A.value(), np.diag([2., 4.]))
    assert symbols.A.degree == 0


def test_constant_symbols():
    symbols = lame_symbols(constant_euclidean_collar(2, 4, 1., 1., [1.]))
    assert np.allclose(symbols.d1.value(), [[0, 1j], [1j, 0]]), f'd1 =\n{symbols.d1.value()}'
    assert np.allclose(symbols.b1.value(), [[0, 2j], [2j/3, 0]]), f'b1 =\n{symbols.b1.value()}'
    assert np.allclose(symbols.c2.value(), -np.diag([3., 1/3])), f'c2 =\n{symbols.c2.value()}'
    for name in ('b0', 'c1', 'c0', 'd0'):
        assert getattr(symbols, name).max_norm() < 1e-14, f'{name} must vanish for constant coefficients'
    assert (symbols.d1.degree, symbols.b1.degree, symbols.c2.degree, symbols.c0.degree) == (1, 1, 2, 0)
    assert abs(symbols.kappa.value-0.5) < 1e-15


def test_graded_b0():
    symbols = lame_symbols(graded_collar())
    assert np.allclose(symbols.b0.value(), [[0, 0], [0, 1/3]]), f'b0 =\n{symbols.b0.value()}'


def test_symbol_homogeneity():
    rng = np.random.default_rng(21)
    for dim in (2, 3):
        collar = random_collar(rng, dim, 5)
        defect = scaling_defect(collar, 2)
        assert defect < 1e-10, f'Rescaling xi changes p_j by {defect} in dimension {dim}'


def test_laplace_beltrami():
    space = JetSpace(2, 4)
    flat = CollarMetric(space, [[space.constant(1.)]])
    square = space.polynomial([((2, 0), 1.), ((0, 2), 1.)])
    assert abs(laplace_beltrami(flat, square).value-4) < 1e-14
    stretched = CollarMetric(space, [[space.constant(4.)]])
    assert abs(laplace_beltrami(stretched, space.polynomial([((2, 0), 1.)])).value-0.5) < 1e-14


@pytest.mark.parametrize('dim', [2, 3])
def test_operator_forms_agree(dim):
    rng = np.random.default_rng(22+dim)
    collar = random_collar(rng, dim, 5)
    field = random_field(rng, collar.space)
    expanded = apply_lame(collar, field)
    covariant = apply_lame_bochner(collar, field)
    factored = apply_factored(collar, field)
    scale = field_scale(expanded)
    assert field_distance(expanded, covariant) < 1e-9*scale, 'Expanded and Bochner forms disagree'
    assert field_distance(expanded, factored) < 1e-9*scale, 'Expanded form and A(d_n^2+B d_n+C) disagree'
    for first, second in zip(expanded, factored):
        assert abs(first.value-second.value) < 1e-10*scale


def test_graded_operator():
    rng = np.random.default_rng(25)
    collar = graded_collar(5)
    field = random_field(rng, collar.space)
    expanded = apply_lame(collar, field)
    assert field_distance(expanded, apply_factored(collar, field)) < 1e-10*field_scale(expanded)
