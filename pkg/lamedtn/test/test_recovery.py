import numpy as np
import pytest

from lamedtn.dtn import DtNSymbolOracle, oracle_from_groundtruth
from lamedtn.errors import BudgetError, DataInconsistencyError
from lamedtn.geometry import CollarData
from lamedtn.jet import JetSpace
from lamedtn.recovery import normal_coefficients, normal_determinant, normal_sensitivity, recover_all, \
    recover_order0
from lamedtn.samples import constant_euclidean_collar, random_collar
from lamedtn.validation import recovery_errors, true_normal_derivatives


class NegatedOracle(DtNSymbolOracle):
    """
    Serves -p_j, which no admissible medium produces
    """
    def __init__(self, oracle):
        DtNSymbolOracle.__init__(self, oracle.space, oracle.depth)
        self.oracle = oracle

    def query(self, degree, xi=None, shift=None):
        return -self.oracle.query(degree, xi, shift)


def layered_collar(order=6):
    space = JetSpace(2, order)
    metric = [[space.polynomial([((0, 0), 1.), ((1, 0), 0.1), ((0, 1), 0.2), ((0, 2), 0.05)])]]
    lam = space.polynomial([((0, 0), 2.), ((1, 0), 0.3), ((0, 1), -0.4), ((0, 2), 0.25), ((1, 1), 0.1)])
    mu = space.polynomial([((0, 0), 1.), ((1, 0), -0.1), ((0, 1), 0.2), ((0, 2), -0.15)])
    return CollarData(space, metric, lam, mu, xi0=[1.])


def test_order0_constant():
    collar = constant_euclidean_collar(3, 4, 2., 0.7, [0.6, -0.8])
    lam, mu, residual = recover_order0(oracle_from_groundtruth(collar, 1), collar.metric)
    assert abs(lam.value-2.) < 1e-12 and abs(mu.value-0.7) < 1e-12
    assert residual < 1e-12


def test_constant_truth_recovers_zeros():
    collar = constant_euclidean_collar(2, 5, 1.5, 1., [1.])
    recovery = recover_all(oracle_from_groundtruth(collar, 3), collar.metric, 2)
    assert recovery.failed_order is None, recovery.error
    lam, mu = recovery.values()
    assert np.allclose(lam, [1.5, 0., 0.], atol=1e-10) and np.allclose(mu, [1., 0., 0.], atol=1e-10)


def test_round_trip():
    collar = layered_collar()
    truth = true_normal_derivatives(collar, 2)
    assert truth[0] == pytest.approx([2., -0.4, 0.5]) and truth[1] == pytest.approx([1., 0.2, -0.3])
    recovery = recover_all(oracle_from_groundtruth(collar, 3), collar.metric, 2)
    assert recovery.orders == 3, str(recovery)
    error = recovery_errors(recovery, truth)
    assert error < 1e-8, f'Recovered derivatives are off by {error}:\n{recovery}'
    assert max(recovery.residuals) < 1e-7
    assert all(condition < 1e10 for condition in recovery.conditioning[1:])


@pytest.mark.parametrize('dim', [2, 3])
def test_random_round_trip(dim):
    rng = np.random.default_rng(51+dim)
    for sample in range(3):
        collar = random_collar(rng, dim, 5)
        truth = true_normal_derivatives(collar, 2)
        recovery = recover_all(oracle_from_groundtruth(collar, 3), collar.metric, 2)
        assert recovery.failed_order is None, recovery.error
        assert recovery_errors(recovery, truth) < 1e-8, str(recovery)


def test_covector_independence():
    collar = layered_collar()
    oracle = oracle_from_groundtruth(collar, 3)
    found = [recover_all(oracle, collar.metric, 2, xi) for xi in ([1.], [2.5], [-0.8])]
    for order in range(3):
        lam = [recovery.values()[0][order] for recovery in found]
        mu = [recovery.values()[1][order] for recovery in found]
        assert max(lam)-min(lam) < 1e-9 and max(mu)-min(mu) < 1e-9, f'Order {order} depends on xi'


def test_tangential_jets():
    collar = layered_collar()
    recovery = recover_all(oracle_from_groundtruth(collar, 3), collar.metric, 1)
    space = collar.space
    slope = recovery.lam_derivs[0].partial(space.x(0))
    assert abs(slope.value-0.3) < 1e-9, 'd_1 lambda at the boundary'
    assert abs(recovery.lam_derivs[1].partial(space.x(0)).value-0.1) < 1e-8, 'd_1 d_n lambda at the boundary'


def test_inconsistent_data():
    collar = constant_euclidean_collar(2, 4, 1., 1., [1.])
    oracle = NegatedOracle(oracle_from_groundtruth(collar, 2))
    with pytest.raises(DataInconsistencyError):
        recover_order0(oracle, collar.metric)
    recovery = recover_all(oracle, collar.metric, 1)
    assert recovery.failed_order == 0 and recovery.orders == 0
    with pytest.raises(BudgetError):
        recover_all(oracle_from_groundtruth(collar, 1), collar.metric, 2)


def test_determinant_identity():
    for mu in np.linspace(0.5, 2., 5):
        for lam in np.linspace(-mu, 3., 10):
            expected = mu*(lam+3*mu)**2
            assert abs(normal_determinant(lam, mu)-expected) < 1e-12*max(expected, 1.)
    coefficients = normal_coefficients(1., 1.)
    assert coefficients.shape == (2, 2)
    assert abs(np.linalg.det(coefficients)) > 0


def test_normal_sensitivity():
    collar = constant_euclidean_collar(2, 5, 1., 1., [1.])
    sensitivity = normal_sensitivity(collar.metric, [collar.lam], [collar.mu], 1)
    assert np.all(np.isfinite(sensitivity))
    assert abs(np.linalg.det(sensitivity)) > 1e-6, f'Order 1 probing is singular:\n{sensitivity}'
    assert np.allclose(sensitivity, normal_coefficients(1., 1.), atol=1e-10), f'Measured {sensitivity}'
    assert np.allclose(sensitivity @ [3., -1.], [1., -1/3], atol=1e-10), 'f3 = 1 and f4 = -1/3 for slopes (3, -1)'


def test_perturbation_scale_invariance():
    rng = np.random.default_rng(74)
    collar = random_collar(rng, 3, 5)
    oracle = oracle_from_groundtruth(collar, 3)
    unit = recover_all(oracle, collar.metric, 2)
    doubled = recover_all(oracle, collar.metric, 2, probe_scale=2.)
    assert unit.failed_order is None and doubled.failed_order is None, doubled.error
    for found, again in zip(unit.values(), doubled.values()):
        assert np.allclose(found, again, rtol=0., atol=1e-9), f'Probing is not affine: {found} vs. {again}'
    assert unit.disagreements[0] is None
    assert max(unit.disagreements[1:]) < 1e-9, f'Row and column systems disagree by {unit.disagreements}'
