import numpy as np
import pytest

from adaprox.gradmap import gradient_mapping, stationarity_metric
from adaprox.problems import Quadratic
from adaprox.prox import Regularizer


def test_zero_regularizer_mapping_equals_gradient():
    x = np.array([3.0, 4.0])
    g = x.copy()  # gradient of 0.5||x||^2
    res = gradient_mapping(x, g, Regularizer.zero(), 1.0)
    assert np.array_equal(res.mapping, g)
    assert res.norm == pytest.approx(5.0)


def test_zero_regularizer_eta_independence():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(8)
    g = rng.standard_normal(8)
    for eta in (0.1, 1.0, 3.7, 10.0):
        res = gradient_mapping(x, g, Regularizer.zero(), eta)
        assert np.allclose(res.mapping, g, atol=1e-12 * (1 + np.abs(g).max()))


def test_box_example():
    res = gradient_mapping(np.zeros(2), np.array([-5.0, 0.0]),
                           Regularizer.box(1.0), 1.0)
    assert np.array_equal(res.mapped_point, [1.0, 0.0])
    assert np.array_equal(res.mapping, [-1.0, 0.0])
    assert res.norm == pytest.approx(1.0)


def test_mapping_consistency_invariant():
    rng = np.random.default_rng(2)
    for _ in range(200):
        d = int(rng.integers(1, 20))
        x = rng.standard_normal(d)
        g = rng.standard_normal(d)
        eta = float(10.0 ** rng.uniform(-2, 2))
        res = gradient_mapping(x, g, Regularizer.l1_box(0.2, 2.0), eta)
        assert np.allclose(res.mapping, (x - res.mapped_point) / eta, rtol=0, atol=0)
        assert res.norm == pytest.approx(float(np.linalg.norm(res.mapping)))


def test_zero_norm_iff_fixed_point():
    rng = np.random.default_rng(3)
    reg = Regularizer.l1_box(0.5, 1.0)
    for _ in range(100):
        x = rng.standard_normal(5)
        g = rng.standard_normal(5)
        res = gradient_mapping(x, g, reg, 1.0)
        fixed = np.allclose(res.mapped_point, x, atol=1e-12 * (1 + np.linalg.norm(x)))
        zero_norm = res.norm <= 1e-12 * (1 + np.linalg.norm(x))
        assert fixed == zero_norm


def test_stationarity_at_unconstrained_minimum():
    q = Quadratic(np.array([2.0, -1.0]))
    assert stationarity_metric(q.center, q, Regularizer.zero()) == pytest.approx(0.0, abs=1e-14)


def test_stationarity_interior_box_minimum():
    center = np.array([0.5, -0.25])
    q = Quadratic(center)
    assert stationarity_metric(center, q, Regularizer.box(1.0)) == pytest.approx(0.0, abs=1e-14)


def test_stationarity_at_active_boundary():
    # 1-D linear objective f(x) = x over the box [-1, 1]: the left endpoint
    # is stationary because prox(x - grad) clamps back to the endpoint
    class Linear:
        n = 1
        dim = 1
        is_convex = True

        def value(self, x):
            return float(x[0])

        def gradient(self, x):
            return np.ones(1)

    metric = stationarity_metric(np.array([-1.0]), Linear(), Regularizer.box(1.0))
    assert metric == pytest.approx(0.0, abs=1e-14)


def test_stochastic_vs_true_mapping_bound():
    rng = np.random.default_rng(4)
    regs = (Regularizer.l1(0.3), Regularizer.box(1.2), Regularizer.l1_box(0.3, 1.2))
    for trial in range(1000):
        reg = regs[trial % 3]
        d = int(rng.integers(1, 30))
        eta = float(10.0 ** rng.uniform(-2, 2))
        x = rng.standard_normal(d)
        g_true = rng.standard_normal(d)
        g_est = g_true + rng.standard_normal(d) * 10.0 ** rng.uniform(-3, 0.5)
        true_map = gradient_mapping(x, g_true, reg, eta).mapping
        est_map = gradient_mapping(x, g_est, reg, eta).mapping
        assert np.linalg.norm(true_map - est_map) \
            <= np.linalg.norm(g_true - g_est) + 1e-10


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        gradient_mapping(np.zeros(2), np.zeros(2), Regularizer.zero(), 0.0)
    with pytest.raises(ValueError):
        gradient_mapping(np.array([np.nan, 0.0]), np.zeros(2), Regularizer.zero(), 1.0)
    with pytest.raises(ValueError):
        gradient_mapping(np.zeros(3), np.zeros(2), Regularizer.zero(), 1.0)
