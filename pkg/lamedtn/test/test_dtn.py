import numpy as np

from lamedtn.dtn import GroundTruthOracle, assemble_p, direct_p1, lowered_principal, oracle_from_groundtruth
from lamedtn.factorization import full_expansion_q
from lamedtn.samples import constant_euclidean_collar, random_collar
from lamedtn.validation import symbol_diagnostics

P1_UNIT = [[1.5, -0.5j], [0.5j, 1.5]]


def test_unit_principal_symbol():
    collar = constant_euclidean_collar(2, 5, 1., 1., [1.])
    p = assemble_p(full_expansion_q(collar, 3), collar)
    assert p.kind == 'p' and p.degrees == [1, 0, -1]
    assert np.allclose(p[1].value(), P1_UNIT), f'p1 =\n{p[1].value()}'
    assert np.allclose(direct_p1(collar).value(), P1_UNIT)
    for degree in (0, -1):
        assert p[degree].max_norm() < 1e-14, f'p_{degree} must vanish for constant coefficients'


def test_two_routes_agree():
    rng = np.random.default_rng(41)
    for dim in (2, 3):
        for sample in range(4):
            collar = random_collar(rng, dim, 5)
            _, p, diagnostics = symbol_diagnostics(collar, 3)
            assert diagnostics['two_route'] < 1e-11, f'Aq1-d1 and the explicit p1 differ by {diagnostics["two_route"]}'
            assert diagnostics['hermitian'] < 1e-12
            assert diagnostics['min_eigenvalue'] > 0, f'G p1 is not positive definite on sample {sample}'
            assert diagnostics['homogeneity'] < 1e-10
            assert direct_p1(collar).distance(p[1]) < 1e-11*max(p[1].max_norm(), 1.)


def test_lowered_principal_hermitian():
    rng = np.random.default_rng(42)
    collar = random_collar(rng, 3, 4)
    lowered = lowered_principal(direct_p1(collar), collar)
    assert np.allclose(lowered, lowered.conj().T, atol=1e-12)
    assert np.min(np.linalg.eigvalsh((lowered+lowered.conj().T)/2)) > 0


def test_oracle_queries():
    rng = np.random.default_rng(43)
    collar = random_collar(rng, 2, 5)
    oracle = oracle_from_groundtruth(collar, 3)
    assert isinstance(oracle, GroundTruthOracle) and oracle.depth == 3
    p1 = oracle.query(1)
    normal = collar.space.normal
    assert p1.restrict([normal]).distance(p1) == 0, 'Oracle answers live on the boundary'
    assert np.allclose(p1.value(), direct_p1(collar).value())
    other = [2.]
    assert np.allclose(oracle.query(0, other).value(),
                       assemble_p(full_expansion_q(collar.with_xi(other), 3), collar.with_xi(other))[0].value())
    shifted = oracle.query(1, shift=[0.2])
    moved = collar.translate([0.2])
    assert np.allclose(shifted.value(), direct_p1(moved).value(), atol=1e-12)
    assert oracle.expansion() is oracle.expansion(collar.xi0, [0.])
