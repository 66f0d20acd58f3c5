"""The three iterative methods.

* ``AdaProx``: proximal gradient with the adaptive step eta_k = eta / S_k,
  where S_k^2 = gamma^2 + sum of squared mapping norms seen so far.  S is
  maintained in squared form and updated multiplicatively,
  S_{k+1}^2 = S_k^2 (1 + ||x_{k+1} - x_k||^2 / eta^2), with one square root
  per step.
* ``AccAdaProx``: the accelerated variant driven by the weight recurrence
  alpha_k = (1 + sqrt(1 + 4 alpha_{k-1}^2)) / 2 and a three-sequence update
  (x query point, z prox sequence, y solution sequence).
* ``ProxGradient``: the classical baseline with constant or 1/sqrt(k) steps.

Each solver is a single-owner resumable stepper; state snapshots round-trip
bitwise through hex-encoded floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .oracle import GradientOracle
from .prox import Regularizer, prox

__all__ = [
    "StepInfo",
    "AdaProx",
    "AccAdaProx",
    "PgStepRule",
    "ProxGradient",
    "estimate_smoothness",
]

SNAPSHOT_VERSION = 1


@dataclass(frozen=True)
class StepInfo:
    """Cheap per-iteration facts emitted by every solver step."""

    k: int
    batch: Optional[int]
    s: Optional[float]  # denominator S_k in effect during the step
    step_size: float  # eta_k actually used
    step_norm: float  # ||x_{k+1} - x_k|| (or ||z_{k+1} - z_k|| for the
    # accelerated solver, whose denominator accumulates the z motion)


def _hex_vector(x: np.ndarray) -> list[str]:
    return [float(v).hex() for v in x]


def _unhex_vector(vals: list[str]) -> np.ndarray:
    return np.array([float.fromhex(v) for v in vals], dtype=np.float64)


class AdaProx:
    """Adaptive proximal gradient stepper.

    Parameters
    ----------
    objective
        Smooth part (value / gradient / batch_gradient).
    reg : Regularizer
        The prox-friendly part h.
    oracle : GradientOracle
        Gradient source; owns the sampling state.
    eta, gamma : float
        Positive hyperparameters; the step at iteration k is eta / S_k with
        S_1 = gamma.
    x0 : ndarray
        Initial point, must lie in dom(h).
    """

    algorithm = "adaprox"

    def __init__(self, objective, reg: Regularizer, oracle: GradientOracle,
                 *, eta: float, gamma: float, x0: np.ndarray):
        if not eta > 0 or not gamma > 0:
            raise ValueError("eta and gamma must be positive")
        self.objective = objective
        self.reg = reg
        self.oracle = oracle
        self.eta = eta
        self.gamma = gamma
        self.k = 0
        self.x = np.array(x0, dtype=np.float64, copy=True)
        self.s_sq = gamma * gamma
        self.last_step_norm = 0.0
        # running average of x_{k+1} over k = 1..t (starts at the second iterate)
        self._sum_x = np.zeros_like(self.x)
        self._avg_count = 0

    @property
    def S(self) -> float:
        return math.sqrt(self.s_sq)

    @property
    def report_point(self) -> np.ndarray:
        return self.x

    @property
    def averaged_point(self) -> Optional[np.ndarray]:
        if self._avg_count == 0:
            return None
        return self._sum_x / self._avg_count

    def step(self) -> StepInfo:
        k = self.k + 1
        g, batch = self.oracle.query(self.x, k)
        s = math.sqrt(self.s_sq)
        eta_k = self.eta / s
        x_new = prox(self.reg, eta_k, self.x - eta_k * g)
        step_norm = float(np.linalg.norm(x_new - self.x))
        self.s_sq *= 1.0 + (step_norm / self.eta) ** 2
        self._sum_x += x_new
        self._avg_count += 1
        self.x = x_new
        self.k = k
        self.last_step_norm = step_norm
        return StepInfo(k=k, batch=batch, s=s, step_size=eta_k, step_norm=step_norm)

    def state_dict(self) -> dict:
        return {
            "format": "adaprox-solver-state",
            "version": SNAPSHOT_VERSION,
            "algorithm": self.algorithm,
            "k": self.k,
            "eta": float(self.eta).hex(),
            "gamma": float(self.gamma).hex(),
            "x": _hex_vector(self.x),
            "s_sq": float(self.s_sq).hex(),
            "last_step_norm": float(self.last_step_norm).hex(),
            "sum_x": _hex_vector(self._sum_x),
            "avg_count": self._avg_count,
            "oracle": self.oracle.state_dict(),
        }

    def load_state_dict(self, state: dict) -> None:
        _check_snapshot(state, self.algorithm)
        self.k = int(state["k"])
        self.eta = float.fromhex(state["eta"])
        self.gamma = float.fromhex(state["gamma"])
        self.x = _unhex_vector(state["x"])
        self.s_sq = float.fromhex(state["s_sq"])
        self.last_step_norm = float.fromhex(state["last_step_norm"])
        self._sum_x = _unhex_vector(state["sum_x"])
        self._avg_count = int(state["avg_count"])
        self.oracle.load_state_dict(state["oracle"])


class AccAdaProx:
    """Accelerated adaptive proximal gradient stepper.

    Maintains y (solution sequence), z (prox sequence) with y_1 = z_1, and
    queries the gradient at the interpolation x_k = (1-theta_k) y_k +
    theta_k z_k.  The denominator accumulates squared z-motion; the reported
    weighted average pairs weight alpha_k with the incoming iterate y_k.
    """

    algorithm = "accadaprox"

    def __init__(self, objective, reg: Regularizer, oracle: GradientOracle,
                 *, eta: float, gamma: float, x0: np.ndarray):
        if not eta > 0 or not gamma > 0:
            raise ValueError("eta and gamma must be positive")
        self.objective = objective
        self.reg = reg
        self.oracle = oracle
        self.eta = eta
        self.gamma = gamma
        self.k = 0
        self.y = np.array(x0, dtype=np.float64, copy=True)
        self.z = np.array(x0, dtype=np.float64, copy=True)
        self.alpha_prev = 0.0
        self.s_sq = gamma * gamma
        self.last_step_norm = 0.0
        self._weighted_y = np.zeros_like(self.y)
        self._weight_total = 0.0

    @property
    def S(self) -> float:
        return math.sqrt(self.s_sq)

    @property
    def report_point(self) -> np.ndarray:
        return self.y

    @property
    def averaged_point(self) -> Optional[np.ndarray]:
        if self._weight_total == 0.0:
            return None
        return self._weighted_y / self._weight_total

    def step(self) -> StepInfo:
        k = self.k + 1
        alpha = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * self.alpha_prev ** 2))
        theta = 1.0 / alpha
        x_query = (1.0 - theta) * self.y + theta * self.z
        g, batch = self.oracle.query(x_query, k)
        s = math.sqrt(self.s_sq)
        prox_step = self.eta / (theta * s)
        z_new = prox(self.reg, prox_step, self.z - prox_step * g)
        y_new = x_query + theta * (z_new - self.z)
        step_norm = float(np.linalg.norm(z_new - self.z))
        # weighted average sums alpha_k * y_k before y is advanced
        self._weighted_y += alpha * self.y
        self._weight_total += alpha
        self.s_sq *= 1.0 + (step_norm / self.eta) ** 2
        self.z = z_new
        self.y = y_new
        self.alpha_prev = alpha
        self.k = k
        self.last_step_norm = step_norm
        return StepInfo(k=k, batch=batch, s=s, step_size=self.eta / s, step_norm=step_norm)

    def state_dict(self) -> dict:
        return {
            "format": "adaprox-solver-state",
            "version": SNAPSHOT_VERSION,
            "algorithm": self.algorithm,
            "k": self.k,
            "eta": float(self.eta).hex(),
            "gamma": float(self.gamma).hex(),
            "y": _hex_vector(self.y),
            "z": _hex_vector(self.z),
            "alpha_prev": float(self.alpha_prev).hex(),
            "s_sq": float(self.s_sq).hex(),
            "last_step_norm": float(self.last_step_norm).hex(),
            "weighted_y": _hex_vector(self._weighted_y),
            "weight_total": float(self._weight_total).hex(),
            "oracle": self.oracle.state_dict(),
        }

    def load_state_dict(self, state: dict) -> None:
        _check_snapshot(state, self.algorithm)
        self.k = int(state["k"])
        self.eta = float.fromhex(state["eta"])
        self.gamma = float.fromhex(state["gamma"])
        self.y = _unhex_vector(state["y"])
        self.z = _unhex_vector(state["z"])
        self.alpha_prev = float.fromhex(state["alpha_prev"])
        self.s_sq = float.fromhex(state["s_sq"])
        self.last_step_norm = float.fromhex(state["last_step_norm"])
        self._weighted_y = _unhex_vector(state["weighted_y"])
        self._weight_total = float.fromhex(state["weight_total"])
        self.oracle.load_state_dict(state["oracle"])


@dataclass(frozen=True)
class PgStepRule:
    """Constant step or alpha0 / sqrt(k)."""

    kind: str  # "constant" | "inv_sqrt"
    alpha: float

    def __post_init__(self) -> None:
        if self.kind not in ("constant", "inv_sqrt"):
            raise ValueError(f"unknown step rule {self.kind!r}")
        if not self.alpha > 0:
            raise ValueError("step size must be positive")

    def at(self, k: int) -> float:
        if self.kind == "constant":
            return self.alpha
        return self.alpha / math.sqrt(k)


class ProxGradient:
    """Classical proximal gradient baseline with a full gradient each step."""

    algorithm = "pg"

    def __init__(self, objective, reg: Regularizer, *, step_rule: PgStepRule,
                 x0: np.ndarray):
        self.objective = objective
        self.reg = reg
        self.step_rule = step_rule
        self.k = 0
        self.x = np.array(x0, dtype=np.float64, copy=True)
        self.last_step_norm = 0.0

    @property
    def report_point(self) -> np.ndarray:
        return self.x

    @property
    def averaged_point(self) -> None:
        return None

    def step(self) -> StepInfo:
        k = self.k + 1
        alpha = self.step_rule.at(k)
        g = self.objective.gradient(self.x)
        x_new = prox(self.reg, alpha, self.x - alpha * g)
        step_norm = float(np.linalg.norm(x_new - self.x))
        self.x = x_new
        self.k = k
        self.last_step_norm = step_norm
        return StepInfo(k=k, batch=self.objective.n, s=None, step_size=alpha,
                        step_norm=step_norm)

    def state_dict(self) -> dict:
        return {
            "format": "adaprox-solver-state",
            "version": SNAPSHOT_VERSION,
            "algorithm": self.algorithm,
            "k": self.k,
            "x": _hex_vector(self.x),
            "last_step_norm": float(self.last_step_norm).hex(),
            "step_kind": self.step_rule.kind,
            "step_alpha": float(self.step_rule.alpha).hex(),
        }

    def load_state_dict(self, state: dict) -> None:
        _check_snapshot(state, self.algorithm)
        self.k = int(state["k"])
        self.x = _unhex_vector(state["x"])
        self.last_step_norm = float.fromhex(state["last_step_norm"])
        self.step_rule = PgStepRule(state["step_kind"], float.fromhex(state["step_alpha"]))


def _check_snapshot(state: dict, algorithm: str) -> None:
    if state.get("format") != "adaprox-solver-state":
        raise ValueError("not a solver state snapshot")
    if state.get("version") != SNAPSHOT_VERSION:
        raise ValueError(f"unsupported snapshot version {state.get('version')}")
    if state.get("algorithm") != algorithm:
        raise ValueError(
            f"snapshot is for {state.get('algorithm')!r}, not {algorithm!r}")


def estimate_smoothness(objective, trials: int = 200, seed: int = 0,
                        *, use_analytic: bool = True) -> float:
    """Estimate the gradient Lipschitz constant.

    Samples pairwise gradient-difference ratios ||grad(u) - grad(v)|| /
    ||u - v|| at mixed scales (global pairs and tight local pairs), and takes
    the max with the objective's analytic bound when one is derivable.  The
    result errs high, which keeps 1/L-hat steps convergent.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    rng = np.random.default_rng(seed)
    d = objective.dim
    best = 0.0
    for i in range(trials):
        scale = (0.1, 1.0, 3.0)[i % 3]
        u = scale * rng.standard_normal(d)
        if i % 2 == 0:
            v = u + 1e-4 * rng.standard_normal(d)
        else:
            v = scale * rng.standard_normal(d)
        denom = float(np.linalg.norm(u - v))
        if denom == 0.0:
            continue
        ratio = float(np.linalg.norm(objective.gradient(u) - objective.gradient(v))) / denom
        best = max(best, ratio)
    analytic = getattr(objective, "analytic_smoothness", None)
    if use_analytic and analytic is not None:
        best = max(best, float(analytic()))
    return best
