import math

import numpy as np
import pytest

from adaprox.prox import (Regularizer, prox, prox_scalar_grid, reg_value,
                          soft_threshold)


def test_prox_zero_is_identity():
    v = np.array([3.0, -4.0])
    assert np.array_equal(prox(Regularizer.zero(), 1.0, v), v)


def test_prox_box_clamps_and_ignores_step():
    reg = Regularizer.box(50.0)
    v = np.array([60.0, -60.0, 3.0])
    expected = np.array([50.0, -50.0, 3.0])
    assert np.array_equal(prox(reg, 7.0, v), expected)
    assert np.array_equal(prox(reg, 0.001, v), expected)


def test_prox_l1_matches_grid_oracle():
    # analytic: soft(2,1)=1, soft(-0.5,1)=0, soft(0,1)=0
    reg = Regularizer.l1(1.0)
    out = prox(reg, 1.0, np.array([2.0, -0.5, 0.0]))
    assert np.allclose(out, [1.0, 0.0, 0.0], atol=1e-12)
    for v, want in ((2.0, 1.0), (-0.5, 0.0), (0.0, 0.0)):
        got = prox_scalar_grid(abs, 1.0, v, -4.0, 4.0, n=100_000)
        assert got == pytest.approx(want, abs=1e-4)


def test_prox_l1_box_matches_grid_oracle():
    reg = Regularizer.l1_box(1.0, 0.8)
    out = prox(reg, 1.0, np.array([2.0, -0.5]))
    assert np.allclose(out, [0.8, 0.0], atol=1e-12)

    def h(z):
        return abs(z) if abs(z) <= 0.8 else math.inf

    for v, want in ((2.0, 0.8), (-0.5, 0.0)):
        got = prox_scalar_grid(h, 1.0, v, -4.0, 4.0, n=100_000)
        assert got == pytest.approx(want, abs=1e-4)


def test_prox_scalar_grid_examples():
    # |.| with v=2 -> 1; zero function -> v; box indicator -> clamp
    assert prox_scalar_grid(abs, 1.0, 2.0, -4.0, 4.0, n=100_000) == pytest.approx(1.0, abs=1e-4)
    assert prox_scalar_grid(lambda z: 0.0, 1.0, -3.0, -5.0, 5.0, n=100_000) == pytest.approx(-3.0, abs=1e-4)

    def box(z):
        return 0.0 if abs(z) <= 1.0 else math.inf

    assert prox_scalar_grid(box, 1.0, 5.0, -2.0, 2.0, n=100_000) == pytest.approx(1.0, abs=1e-4)


def test_soft_threshold_tie_is_exact_zero():
    # |v| == tau resolves to exactly 0.0, not a denormal
    out = soft_threshold(np.array([0.3, -0.3]), 0.3)
    assert out[0] == 0.0 and out[1] == 0.0


def test_prox_rejects_bad_input():
    with pytest.raises(ValueError):
        prox(Regularizer.l1(1.0), 0.0, np.array([1.0]))
    with pytest.raises(ValueError):
        prox(Regularizer.l1(1.0), 1.0, np.array([np.nan]))
    with pytest.raises(ValueError):
        prox(Regularizer.box(2.0), 1.0, np.array([np.inf]))


def test_regularizer_validation():
    with pytest.raises(ValueError):
        Regularizer.l1(-0.5)
    with pytest.raises(ValueError):
        Regularizer.box(0.0)
    with pytest.raises(ValueError):
        Regularizer("nuclear")


def test_reg_value_examples():
    assert reg_value(Regularizer.l1(0.001), np.array([1.0, -1.0])) == pytest.approx(0.002)
    assert reg_value(Regularizer.box(50.0), np.array([51.0, 0.0])) == math.inf
    assert reg_value(Regularizer.l1_box(2.0, 1.0), np.array([0.5, -0.5])) == pytest.approx(2.0)
    assert reg_value(Regularizer.zero(), np.array([9.0])) == 0.0


def test_reg_value_boundary_is_inside():
    reg = Regularizer.box(1.0)
    assert reg_value(reg, np.array([1.0, -1.0])) == 0.0


def test_nonexpansiveness_random_trials():
    rng = np.random.default_rng(42)
    kinds = (Regularizer.zero(), Regularizer.l1(0.7), Regularizer.box(2.0),
             Regularizer.l1_box(0.3, 1.5))
    for trial in range(1000):
        reg = kinds[trial % 4]
        d = int(rng.integers(1, 51))
        step = float(10.0 ** rng.uniform(-3, 3))
        x = rng.standard_normal(d) * 10.0 ** rng.uniform(-1, 1)
        y = rng.standard_normal(d) * 10.0 ** rng.uniform(-1, 1)
        lhs = np.linalg.norm(prox(reg, step, x) - prox(reg, step, y))
        assert lhs <= np.linalg.norm(x - y) + 1e-12


def test_fixed_points():
    assert np.array_equal(prox(Regularizer.l1(0.5), 2.0, np.zeros(3)), np.zeros(3))
    reg = Regularizer.box(3.0)
    x = np.array([2.9, -3.0, 0.0])
    assert np.array_equal(prox(reg, 1.0, x), x)


def test_box_prox_idempotent_exactly():
    reg = Regularizer.box(1.5)
    rng = np.random.default_rng(7)
    v = 5.0 * rng.standard_normal(20)
    once = prox(reg, 1.0, v)
    assert np.array_equal(prox(reg, 1.0, once), once)


def test_l1_box_optimality_certificate_against_grid():
    # returned point beats the brute-force scalar minimum per coordinate
    rng = np.random.default_rng(99)
    lam, radius = 0.4, 1.2
    reg = Regularizer.l1_box(lam, radius)

    def h(z):
        return lam * abs(z) if abs(z) <= radius else math.inf

    for _ in range(25):
        step = float(10.0 ** rng.uniform(-1, 1))
        v = rng.standard_normal(4) * 3.0
        z = prox(reg, step, v)
        for i in range(4):
            zi_val = h(z[i]) + (z[i] - v[i]) ** 2 / (2 * step)
            lim = abs(v[i]) + radius + 1.0
            z_grid = prox_scalar_grid(h, step, float(v[i]), -lim, lim, n=2000)
            grid_val = h(z_grid) + (z_grid - v[i]) ** 2 / (2 * step)
            assert zi_val <= grid_val + 1e-6
