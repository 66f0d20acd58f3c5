import math

import numpy as np
import pytest

from adaprox.oracle import BatchSchedule, GradientOracle
from adaprox.problems import Logistic, Quadratic, synthetic_classification
from adaprox.prox import Regularizer, reg_value
from adaprox.solvers import (AccAdaProx, AdaProx, PgStepRule, ProxGradient,
                             estimate_smoothness)


def full_oracle(objective, seed=0):
    return GradientOracle(objective, BatchSchedule.full(), seed)


def make_adaprox(objective, reg, *, eta, gamma, x0=None, seed=0):
    x0 = np.zeros(objective.dim) if x0 is None else x0
    return AdaProx(objective, reg, full_oracle(objective, seed),
                   eta=eta, gamma=gamma, x0=x0)


class TestAdaProxStep:
    def test_zero_reg_is_scaled_gradient_step(self):
        q = Quadratic(np.array([1.0, -1.0]))
        solver = make_adaprox(q, Regularizer.zero(), eta=2.0, gamma=1.5)
        x0 = solver.x.copy()
        g = q.gradient(x0)
        solver.step()
        assert np.allclose(solver.x, x0 - (2.0 / 1.5) * g, atol=1e-15)

    def test_s_update_formula(self):
        # engineered step of norm 2 with gamma=1, eta=2: S_2^2 = 1 * (1 + 4/4) = 2
        q = Quadratic(np.array([2.0]))  # gradient at 0 is -2, step eta/gamma = 2 -> uh
        solver = make_adaprox(q, Regularizer.zero(), eta=2.0, gamma=2.0)
        # step size eta/S = 1, gradient -2 -> x moves by 2
        info = solver.step()
        assert info.step_norm == pytest.approx(2.0)
        assert solver.s_sq == pytest.approx(4.0 * (1.0 + 4.0 / 4.0))

        solver2 = make_adaprox(Quadratic(np.array([2.0])), Regularizer.zero(),
                               eta=2.0, gamma=1.0)
        # gamma=1: step = 2, gradient -2 -> moves 4; S^2 = 1+16/4 = 5
        info2 = solver2.step()
        assert info2.step_norm == pytest.approx(4.0)
        assert solver2.s_sq == pytest.approx(5.0)

    def test_fixed_point_keeps_s(self):
        c = np.array([1.0, 2.0])
        solver = make_adaprox(Quadratic(c), Regularizer.zero(), eta=1.0,
                              gamma=1.0, x0=c.copy())
        solver.step()
        assert np.array_equal(solver.x, c)
        assert solver.S == pytest.approx(1.0)

    def test_averaging_starts_at_second_iterate(self):
        q = Quadratic(np.array([4.0]))
        solver = make_adaprox(q, Regularizer.zero(), eta=1.0, gamma=1.0)
        assert solver.averaged_point is None
        solver.step()
        x2 = solver.x.copy()
        assert np.array_equal(solver.averaged_point, x2)
        solver.step()
        assert np.allclose(solver.averaged_point, (x2 + solver.x) / 2, atol=1e-15)

    def test_s_squared_consistency_with_mapping_sum(self, desk_logistic):
        _, objective, reg = desk_logistic
        solver = make_adaprox(objective, reg, eta=10.0, gamma=1.0)
        acc = 0.0
        gamma_sq = 1.0
        for _ in range(300):
            s_before = solver.S
            info = solver.step()
            # the solver's own mapping norm is step_norm / eta_k
            acc += (info.step_norm / (10.0 / s_before)) ** 2
            assert solver.s_sq == pytest.approx(gamma_sq + acc, rel=1e-8)

    def test_step_sizes_nonincreasing(self, desk_svm):
        _, objective, reg = desk_svm
        solver = make_adaprox(objective, reg, eta=10.0, gamma=1.0)
        steps = [solver.step().step_size for _ in range(200)]
        assert all(s2 <= s1 + 1e-15 for s1, s2 in zip(steps, steps[1:]))


class TestAccAdaProxStep:
    def test_first_step_collapses_interpolation(self, desk_logistic):
        _, objective, reg = desk_logistic
        x0 = np.zeros(objective.dim)
        oracle = full_oracle(objective)
        solver = AccAdaProx(objective, reg, oracle, eta=10.0, gamma=1.0, x0=x0)
        # alpha_1 = 1, theta_1 = 1: query point is z_1 = x0 and y_2 = z_2
        g1 = objective.gradient(x0)
        solver.step()
        assert np.allclose(solver.y, solver.z, rtol=0,
                           atol=1e-15 * (1 + np.abs(solver.z).max()))
        from adaprox.prox import prox
        z2 = prox(reg, 10.0, x0 - 10.0 * g1)
        assert np.allclose(solver.z, z2, atol=1e-15)

    def test_alpha_sequence_values(self):
        q = Quadratic(np.array([1.0]))
        solver = AccAdaProx(q, Regularizer.zero(), full_oracle(q), eta=1.0,
                            gamma=1.0, x0=np.zeros(1))
        alphas = []
        for _ in range(3):
            solver.step()
            alphas.append(solver.alpha_prev)
        assert alphas[0] == pytest.approx(1.0, abs=1e-12)
        assert alphas[1] == pytest.approx((1 + math.sqrt(5)) / 2, abs=1e-9)
        assert alphas[2] == pytest.approx(2.193527, abs=1e-6)
        assert alphas[2] ** 2 - alphas[2] == pytest.approx(alphas[1] ** 2, abs=1e-9)

    def test_zero_reg_reduction(self):
        # with h = 0 the z update is a plain scaled gradient step
        q = Quadratic(np.array([3.0, -2.0]))
        solver = AccAdaProx(q, Regularizer.zero(), full_oracle(q), eta=2.0,
                            gamma=1.5, x0=np.zeros(2))
        for _ in range(5):
            z_old = solver.z.copy()
            y_old = solver.y.copy()
            alpha_prev = solver.alpha_prev
            s = solver.S
            solver.step()
            alpha = 0.5 * (1 + math.sqrt(1 + 4 * alpha_prev**2))
            theta = 1.0 / alpha
            x_query = (1 - theta) * y_old + theta * z_old
            expected = z_old - (2.0 * alpha / s) * q.gradient(x_query)
            assert np.allclose(solver.z, expected, atol=1e-13)

    def test_weighted_average_accounting(self, desk_logistic):
        _, objective, reg = desk_logistic
        solver = AccAdaProx(objective, reg, full_oracle(objective), eta=10.0,
                            gamma=1.0, x0=np.zeros(objective.dim))
        weights = []
        weighted = np.zeros(objective.dim)
        for _ in range(50):
            alpha_prev = solver.alpha_prev
            y_in = solver.y.copy()
            solver.step()
            alpha = 0.5 * (1 + math.sqrt(1 + 4 * alpha_prev**2))
            weights.append(alpha)
            weighted += alpha * y_in
        assert solver._weight_total == pytest.approx(sum(weights), rel=1e-14)
        assert np.allclose(solver.averaged_point, weighted / sum(weights), atol=1e-12)

    def test_alpha_bounds_along_run(self):
        q = Quadratic(np.ones(2))
        solver = AccAdaProx(q, Regularizer.zero(), full_oracle(q), eta=1.0,
                            gamma=1.0, x0=np.zeros(2))
        for k in range(1, 500):
            solver.step()
            assert (k + 1) / 2 <= solver.alpha_prev <= k + 1


class TestProxGradient:
    def test_one_step_convergence_on_quadratic(self):
        c = np.array([0.3, -0.7])
        solver = ProxGradient(Quadratic(c), Regularizer.zero(),
                              step_rule=PgStepRule("constant", 1.0),
                              x0=np.array([5.0, 5.0]))
        solver.step()
        assert np.allclose(solver.x, c, atol=1e-15)

    def test_zero_step_rejected(self):
        with pytest.raises(ValueError):
            PgStepRule("constant", 0.0)

    def test_box_clamping(self):
        c = np.array([10.0])
        solver = ProxGradient(Quadratic(c), Regularizer.box(1.0),
                              step_rule=PgStepRule("constant", 1.0),
                              x0=np.zeros(1))
        solver.step()
        assert solver.x[0] == 1.0

    def test_inv_sqrt_rule(self):
        rule = PgStepRule("inv_sqrt", 0.5)
        assert rule.at(1) == 0.5
        assert rule.at(4) == 0.25


class TestReductionEquivalence:
    def test_matches_reference_gradient_descent(self):
        # independent plain loop: x <- x - (eta/S) * grad, S^2 <- S^2 + ||dx||^2/eta_k^2
        rng = np.random.default_rng(8)
        center = rng.standard_normal(6)
        q = Quadratic(center)
        eta, gamma = 1.7, 0.9
        solver = make_adaprox(q, Regularizer.zero(), eta=eta, gamma=gamma,
                              x0=np.zeros(6))

        x = np.zeros(6)
        s_sq = gamma * gamma
        for _ in range(100):
            solver.step()
            step = eta / math.sqrt(s_sq)
            x_new = x - step * (x - center)
            s_sq = s_sq + float(np.dot(x_new - x, x_new - x)) / step**2
            x = x_new
            assert np.linalg.norm(solver.x - x) <= 1e-12
            assert abs(solver.s_sq - s_sq) <= 1e-12 * max(1.0, s_sq)


class TestSmoothnessEstimate:
    def test_quadratic_exact(self):
        q = Quadratic(np.zeros(4))
        lhat = estimate_smoothness(q, trials=200, seed=0)
        assert 0.999 <= lhat <= 1.001

    def test_logistic_sampled_below_analytic(self, desk_logistic):
        _, objective, _ = desk_logistic
        sampled = estimate_smoothness(objective, trials=300, seed=1,
                                      use_analytic=False)
        analytic = objective.analytic_smoothness()
        assert analytic == pytest.approx(0.25, abs=1e-12)
        assert sampled <= analytic + 1e-6
        assert estimate_smoothness(objective, trials=300, seed=1) == analytic

    def test_ridge_lower_bound(self, desk_svm):
        _, objective, _ = desk_svm
        assert estimate_smoothness(objective, seed=2) >= objective.mu

    def test_trials_precondition(self):
        with pytest.raises(ValueError):
            estimate_smoothness(Quadratic(np.zeros(2)), trials=10)


class TestDescentTail:
    def test_monotone_once_gate_opens(self, desk_svm):
        _, objective, reg = desk_svm
        eta, gamma = 1.0, 1.0
        lhat = estimate_smoothness(objective, seed=0)
        solver = make_adaprox(objective, reg, eta=eta, gamma=gamma)
        gate = lhat * eta / 2.0

        def full_value(x):
            return objective.value(x) + reg_value(reg, x)

        started = False
        prev_f = full_value(solver.x)
        for _ in range(500):
            s_now = solver.S
            solver.step()
            f_now = full_value(solver.x)
            if s_now > gate:
                started = True
            if started:
                assert f_now <= prev_f + 1e-9 * (1 + abs(prev_f))
            prev_f = f_now
        assert started  # gamma=1 > lhat/2 so the gate opens immediately


class TestSnapshots:
    def test_adaprox_roundtrip_bitwise(self, desk_logistic):
        _, objective, reg = desk_logistic
        solver = AdaProx(objective, reg,
                         GradientOracle(objective, BatchSchedule.constant(4), 5),
                         eta=10.0, gamma=1.0, x0=np.zeros(objective.dim))
        for _ in range(40):
            solver.step()
        snap = solver.state_dict()
        ahead = [solver.step() for _ in range(40)]

        fresh = AdaProx(objective, reg,
                        GradientOracle(objective, BatchSchedule.constant(4), 0),
                        eta=1.0, gamma=1.0, x0=np.zeros(objective.dim))
        fresh.load_state_dict(snap)
        for info in ahead:
            info2 = fresh.step()
            assert info2.k == info.k
            assert info2.step_norm == info.step_norm  # bitwise equal floats
        assert np.array_equal(fresh.x, solver.x)
        assert fresh.s_sq == solver.s_sq

    def test_accadaprox_roundtrip_bitwise(self, desk_logistic):
        _, objective, reg = desk_logistic
        solver = AccAdaProx(objective, reg,
                            GradientOracle(objective, BatchSchedule.constant(2), 6),
                            eta=10.0, gamma=1.0, x0=np.zeros(objective.dim))
        for _ in range(25):
            solver.step()
        snap = solver.state_dict()
        import json

        snap = json.loads(json.dumps(snap))  # must survive JSON round-trip
        for _ in range(25):
            solver.step()

        fresh = AccAdaProx(objective, reg,
                           GradientOracle(objective, BatchSchedule.constant(2), 0),
                           eta=3.0, gamma=2.0, x0=np.zeros(objective.dim))
        fresh.load_state_dict(snap)
        for _ in range(25):
            fresh.step()
        assert np.array_equal(fresh.y, solver.y)
        assert np.array_equal(fresh.z, solver.z)
        assert fresh.s_sq == solver.s_sq

    def test_wrong_algorithm_rejected(self, desk_logistic):
        _, objective, reg = desk_logistic
        a = make_adaprox(objective, reg, eta=1.0, gamma=1.0)
        acc = AccAdaProx(objective, reg, full_oracle(objective), eta=1.0,
                         gamma=1.0, x0=np.zeros(objective.dim))
        with pytest.raises(ValueError, match="snapshot"):
            acc.load_state_dict(a.state_dict())


def test_convex_objective_final_below_initial(desk_logistic):
    _, objective, reg = desk_logistic
    solver = make_adaprox(objective, reg, eta=10.0, gamma=1.0)

    def averaged_value():
        avg = solver.averaged_point
        return objective.value(avg) + reg_value(reg, avg)

    solver.step()
    first = averaged_value()
    for _ in range(400):
        solver.step()
    assert averaged_value() < first
