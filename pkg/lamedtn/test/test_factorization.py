import numpy as np
import pytest
import scipy.linalg

from lamedtn.errors import BudgetError, StructureError
from lamedtn.factorization import E_term, SymbolExpansion, euler_defect, first_E, full_expansion_q, \
    full_symbol_residual, next_q_closed_form, nilpotent_pair, principal_q, second_E, sylvester_residual, \
    sylvester_solve
from lamedtn.geometry import CollarData
from lamedtn.jet import JetSpace, SymbolMatrix, count
from lamedtn.samples import constant_euclidean_collar, random_collar
from lamedtn.symbols import lame_symbols


def unit_collar(order=5):
    return constant_euclidean_collar(2, order, 1., 1., [1.])


def graded_collar(order=5):
    space = JetSpace(2, order)
    lam = space.polynomial([((0, 0), 1.), ((0, 1), 1.)])
    return CollarData(space, [[space.constant(1.)]], lam, space.constant(1.), xi0=[1.])


def random_symbol(rng, space, degree):
    size = count(space.n_vars, space.order)
    coeffs = rng.normal(size=(space.dim, space.dim, size))+1j*rng.normal(size=(space.dim, space.dim, size))
    return SymbolMatrix(coeffs, space.n_vars, space.order, degree)


def test_principal_symbol():
    collar = unit_collar()
    q1 = principal_q(collar)
    assert q1.degree == 1
    assert np.allclose(q1.value(), [[1.5, 0.5j], [0.5j, 0.5]]), f'q1 =\n{q1.value()}'
    symbols = lame_symbols(collar)
    identity = q1 @ q1-symbols.b1 @ q1+symbols.c2
    assert identity.max_norm() < 1e-12


def test_nilpotent_pair():
    rng = np.random.default_rng(31)
    symbols = lame_symbols(random_collar(rng, 3, 4))
    first, second = nilpotent_pair(symbols)
    assert (first @ first).max_norm() < 1e-12
    assert (second @ second).max_norm() < 1e-12
    q1 = principal_q(symbols.collar)
    assert q1.distance(SymbolMatrix.identity(3, 5, 4, 1)*symbols.xi_norm+first*symbols.kappa) < 1e-13
    moved = q1-symbols.b1
    assert moved.distance(SymbolMatrix.identity(3, 5, 4, 1)*symbols.xi_norm+second*symbols.kappa) < 1e-12


def test_closed_form_solves_sylvester():
    rng = np.random.default_rng(32)
    collar = unit_collar(4)
    symbols = lame_symbols(collar)
    q1 = principal_q(collar)
    E = random_symbol(rng, collar.space, 1)
    X = next_q_closed_form(E, symbols)
    assert X.degree == 0
    assert sylvester_residual(q1-symbols.b1, q1, X, E) < 1e-12
    iterated = sylvester_solve(q1-symbols.b1, q1, E)
    assert X.distance(iterated) < 1e-10*max(X.max_norm(), 1.)
    reference = scipy.linalg.solve_sylvester((q1-symbols.b1).value(), q1.value(), E.value())
    assert np.allclose(X.value(), reference, atol=1e-12)


def test_constant_collapse():
    expansion = full_expansion_q(unit_collar(6), 4)
    assert expansion.degrees == [1, 0, -1, -2]
    for degree in (0, -1, -2):
        assert expansion[degree].max_norm() < 1e-14, f'q_{degree} must vanish for constant coefficients'


def test_graded_first_E():
    collar = graded_collar()
    symbols = lame_symbols(collar)
    q = full_expansion_q(collar, 1)
    first, _ = nilpotent_pair(symbols)
    slope = q[1].partial(collar.space.normal)
    assert np.allclose(slope.value(), first.value()/8), f'd_n q1 =\n{slope.value()}'
    assert np.allclose(slope.value(), [[1/8, 1j/8], [1j/8, -1/8]])
    E = first_E(q, symbols)
    expected = symbols.b0 @ q[1]+slope-symbols.c1
    assert E.distance(expected) < 1e-12, 'Tangential terms must vanish for x_n-only data'


def test_literal_E_terms():
    rng = np.random.default_rng(33)
    collar = random_collar(rng, 2, 6)
    symbols = lame_symbols(collar)
    q = full_expansion_q(collar, 3)
    assert first_E(q, symbols).distance(E_term(-1, q, symbols)) < 1e-11
    assert second_E(q, symbols).distance(E_term(0, q, symbols)) < 1e-11


@pytest.mark.parametrize('dim', [2, 3])
def test_full_symbol_equation(dim):
    rng = np.random.default_rng(34+dim)
    for sample in range(3):
        collar = random_collar(rng, dim, 6)
        q = full_expansion_q(collar, 4, cross_check=True)
        symbols = lame_symbols(collar)
        for degree in (2, 1, 0, -1):
            residual = full_symbol_residual(q, symbols, degree)
            assert residual < 1e-10, f'Degree {degree} residual {residual} on sample {sample}'
        assert max(q.residuals.values()) < 1e-11
        assert max(q.cross_checks.values()) < 1e-9
        for term in q:
            assert euler_defect(term, symbols) < 1e-10, f'q_{term.degree} is not homogeneous'


def test_expansion_depth():
    collar = unit_collar(6)
    assert full_expansion_q(collar, 1).degrees == [1], 'Depth 1 is the principal symbol alone'
    assert full_expansion_q(collar, 1)[1].distance(principal_q(collar)) == 0
    for depth in (2, 3, 4):
        expansion = full_expansion_q(collar, depth)
        assert len(expansion) == depth and expansion.lowest == 2-depth, f'Depth {depth} gives {expansion.degrees}'


def test_budget():
    with pytest.raises(BudgetError):
        full_expansion_q(unit_collar(4), 3)
    with pytest.raises(ValueError):
        full_expansion_q(unit_collar(4), 0)
    q = full_expansion_q(unit_collar(4), 2)
    with pytest.raises(StructureError):
        full_symbol_residual(q, lame_symbols(unit_collar(4)), -1)


def test_expansion_structure():
    space = JetSpace(2, 3)
    expansion = SymbolExpansion([SymbolMatrix.zeros(2, 3, 3, 1), SymbolMatrix.zeros(2, 3, 3, 0)])
    assert expansion.highest == 1 and expansion.lowest == 0 and len(expansion) == 2
    assert 0 in expansion and -1 not in expansion
    with pytest.raises(StructureError):
        expansion.append(SymbolMatrix.zeros(2, 3, 3, -3))
    with pytest.raises(StructureError):
        expansion[-1]
    with pytest.raises(StructureError):
        expansion.append(SymbolMatrix.zeros(3, 3, 3, -1))
    frozen = expansion.restrict(space.cotangent)
    assert frozen.degrees == [1, 0]
