"""Self-check suites behind ``adaprox verify``.

Each suite stress-tests one identity or bound the solvers rely on, using
seeded randomness so results are reproducible.  The ``fast`` level finishes
in well under a minute; ``full`` adds the large Monte-Carlo suites.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import prox as prox_mod
from .gradmap import gradient_mapping
from .oracle import BatchSchedule, GradientOracle
from .problems import Logistic, TanhSvm, synthetic_classification
from .prox import Regularizer
from .solvers import AccAdaProx

__all__ = ["SuiteResult", "run_suites", "FAST_SUITES", "FULL_SUITES"]


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checks: int
    failures: int
    detail: str = ""


def _random_regularizer(rng: np.random.Generator) -> Regularizer:
    kind = rng.integers(0, 4)
    lam = float(10.0 ** rng.uniform(-3, 1))
    radius = float(10.0 ** rng.uniform(-1, 2))
    if kind == 0:
        return Regularizer.zero()
    if kind == 1:
        return Regularizer.l1(lam)
    if kind == 2:
        return Regularizer.box(radius)
    return Regularizer.l1_box(lam, radius)


def suite_prox_nonexpansive(trials: int = 1000, seed: int = 101) -> SuiteResult:
    """||prox(x) - prox(y)|| <= ||x - y|| for every supported regularizer."""
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(trials):
        reg = _random_regularizer(rng)
        d = int(rng.integers(1, 51))
        step = float(10.0 ** rng.uniform(-3, 3))
        scale = float(10.0 ** rng.uniform(-1, 2))
        x = scale * rng.standard_normal(d)
        y = scale * rng.standard_normal(d)
        lhs = np.linalg.norm(prox_mod.prox(reg, step, x) - prox_mod.prox(reg, step, y))
        if lhs > np.linalg.norm(x - y) + 1e-12:
            failures += 1
    return SuiteResult("prox_nonexpansive", failures == 0, trials, failures)


def suite_cumulative_sum_bounds(sequences: int = 1000, seed: int = 202) -> SuiteResult:
    """Two-sided sqrt bound and log bound for sums a_k / A_{k-1}^p with
    nonnegative a_k <= C * A_{k-1} (the analytic tool behind the adaptive
    denominator)."""
    rng = np.random.default_rng(seed)
    failures = 0
    slack = 1e-9
    for trial in range(sequences):
        c = (0.1, 1.0, 10.0)[trial % 3]
        a0 = float(10.0 ** rng.uniform(-2, 2))
        t = int(rng.integers(5, 200))
        sqrt_sum = 0.0
        log_sum = 0.0
        cum = a0
        for _ in range(t):
            a_k = float(rng.random()) * c * cum
            sqrt_sum += a_k / math.sqrt(cum)
            log_sum += a_k / cum
            cum += a_k
        lower = 2.0 * (math.sqrt(cum) - math.sqrt(a0))
        upper = (1.0 + math.sqrt(1.0 + c)) * (math.sqrt(cum) - math.sqrt(a0))
        log_upper = (1.0 + c) * math.log(cum / a0)
        ok = (lower <= sqrt_sum + slack
              and sqrt_sum <= upper + slack
              and log_sum <= log_upper + slack)
        if not ok:
            failures += 1
    return SuiteResult("cumulative_sum_bounds", failures == 0, sequences, failures)


def suite_accel_weight_recurrence(k_max: int = 10_000) -> SuiteResult:
    """alpha_k^2 - alpha_k == alpha_{k-1}^2 and (k+1)/2 <= alpha_k <= k+1."""
    failures = 0
    alpha_prev = 0.0
    for k in range(1, k_max + 1):
        alpha = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * alpha_prev ** 2))
        if abs(alpha * alpha - alpha - alpha_prev ** 2) > 1e-10 * max(1.0, alpha * alpha):
            failures += 1
        if not ((k + 1) / 2 <= alpha <= k + 1):
            failures += 1
        alpha_prev = alpha
    return SuiteResult("accel_weight_recurrence", failures == 0, k_max, failures)


def suite_interpolation_identity(iters: int = 300, seed: int = 303) -> SuiteResult:
    """Along a real accelerated run: y_{k+1} == theta_k z_{k+1} + (1-theta_k) y_k."""
    ds = synthetic_classification(80, 10, margin=0.1, seed=seed)
    objective = Logistic(ds)
    reg = Regularizer.l1_box(1e-3, 50.0)
    oracle = GradientOracle(objective, BatchSchedule.full(), seed)
    solver = AccAdaProx(objective, reg, oracle, eta=10.0, gamma=1.0,
                        x0=np.zeros(ds.d))
    failures = 0
    for _ in range(iters):
        y_old = solver.y.copy()
        alpha_prev = solver.alpha_prev
        solver.step()
        alpha = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * alpha_prev ** 2))
        theta = 1.0 / alpha
        recombined = theta * solver.z + (1.0 - theta) * y_old
        err = np.linalg.norm(solver.y - recombined)
        if err > 1e-10 * (1.0 + np.linalg.norm(solver.y)):
            failures += 1
    return SuiteResult("interpolation_identity", failures == 0, iters, failures)


def suite_mapping_noise_bound(trials: int = 1000, seed: int = 404) -> SuiteResult:
    """||G - G_tilde|| <= ||true gradient - estimate|| at matched eta
    (a consequence of prox nonexpansiveness)."""
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(trials):
        reg = _random_regularizer(rng)
        d = int(rng.integers(1, 31))
        eta = float(10.0 ** rng.uniform(-2, 2))
        x = rng.standard_normal(d)
        g_true = rng.standard_normal(d)
        g_noisy = g_true + rng.standard_normal(d) * float(10.0 ** rng.uniform(-3, 1))
        gm_true = gradient_mapping(x, g_true, reg, eta)
        gm_noisy = gradient_mapping(x, g_noisy, reg, eta)
        diff = np.linalg.norm(gm_true.mapping - gm_noisy.mapping)
        if diff > np.linalg.norm(g_true - g_noisy) + 1e-10:
            failures += 1
    return SuiteResult("mapping_noise_bound", failures == 0, trials, failures)


def _central_difference(value: Callable[[np.ndarray], float], x: np.ndarray,
                        h: float = 1e-5) -> np.ndarray:
    grad = np.zeros_like(x)
    for i in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        grad[i] = (value(xp) - value(xm)) / (2.0 * h)
    return grad


def suite_gradient_fd_check(seed: int = 505) -> SuiteResult:
    """Central finite differences match analytic gradients to 1e-5."""
    rng = np.random.default_rng(seed)
    failures = 0
    checks = 0
    for make in (lambda ds: TanhSvm(ds, mu=1e-3), lambda ds: Logistic(ds)):
        for trial in range(5):
            ds = synthetic_classification(
                int(rng.integers(20, 101)), int(rng.integers(3, 31)),
                margin=0.05, flip=0.1, seed=seed + trial)
            objective = make(ds)
            x = rng.standard_normal(ds.d)
            fd = _central_difference(objective.value, x)
            an = objective.gradient(x)
            checks += ds.d
            bad = np.abs(fd - an) > 1e-5 * (1.0 + np.abs(an))
            failures += int(np.sum(bad))
    return SuiteResult("gradient_fd_check", failures == 0, checks, failures)


def suite_minibatch_unbiased(draws: int = 10_000, seed: int = 606) -> SuiteResult:
    """Mean of singleton-batch gradients matches the full gradient to 5 SEs."""
    ds = synthetic_classification(60, 8, margin=0.05, flip=0.1, seed=seed)
    failures = 0
    checks = 0
    for objective in (TanhSvm(ds, mu=1e-3), Logistic(ds)):
        rng = np.random.default_rng(seed + 1)
        x = rng.standard_normal(ds.d)
        samples = np.empty((draws, ds.d))
        for i in range(draws):
            idx = rng.integers(0, ds.n, size=1)
            samples[i] = objective.batch_gradient(x, idx)
        mean = samples.mean(axis=0)
        se = samples.std(axis=0, ddof=1) / math.sqrt(draws)
        full = objective.gradient(x)
        checks += ds.d
        failures += int(np.sum(np.abs(mean - full) > 5.0 * se + 1e-12))
    return SuiteResult("minibatch_unbiased", failures == 0, checks, failures)


def suite_variance_scaling(draws: int = 10_000, seed: int = 707) -> SuiteResult:
    """Empirical variance of batch-b gradients is ~ 1/b of the batch-1
    variance (ratio within [0.7, 1.3]) for b in {2, 4, 8}."""
    ds = synthetic_classification(60, 8, margin=0.05, flip=0.1, seed=seed)
    objective = TanhSvm(ds, mu=1e-3)
    rng = np.random.default_rng(seed + 1)
    x = rng.standard_normal(ds.d)
    full = objective.gradient(x)

    def empirical_variance(b: int) -> float:
        total = 0.0
        for _ in range(draws):
            idx = rng.integers(0, ds.n, size=b)
            diff = objective.batch_gradient(x, idx) - full
            total += float(np.dot(diff, diff))
        return total / draws

    var1 = empirical_variance(1)
    failures = 0
    for b in (2, 4, 8):
        ratio = empirical_variance(b) / (var1 / b)
        if not 0.7 <= ratio <= 1.3:
            failures += 1
    return SuiteResult("variance_scaling", failures == 0, 3, failures)


FAST_SUITES: list[Callable[[], SuiteResult]] = [
    suite_prox_nonexpansive,
    suite_cumulative_sum_bounds,
    suite_accel_weight_recurrence,
    suite_interpolation_identity,
    suite_mapping_noise_bound,
    suite_gradient_fd_check,
]

FULL_SUITES: list[Callable[[], SuiteResult]] = FAST_SUITES + [
    suite_minibatch_unbiased,
    suite_variance_scaling,
]


def run_suites(level: str = "fast") -> list[SuiteResult]:
    if level not in ("fast", "full"):
        raise ValueError(f"unknown verify level {level!r}")
    suites = FAST_SUITES if level == "fast" else FULL_SUITES
    return [suite() for suite in suites]
