"""Proximal operators for the supported regularizers.

Every regularizer here is separable and symmetric, so its prox has a
closed form built from soft-thresholding and clamping.  A brute-force 1-D
grid oracle is provided so the closed forms can be validated against an
independent computation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "Regularizer",
    "soft_threshold",
    "prox",
    "reg_value",
    "prox_scalar_grid",
]

_KINDS = ("zero", "l1", "box", "l1_box")


@dataclass(frozen=True)
class Regularizer:
    """A simple convex regularizer h: one of 0, lam*||.||_1, the indicator of
    [-radius, radius]^d, or their sum.

    All supported kinds are convex, proper and lower semicontinuous, so the
    prox is a well-defined single point.
    """

    kind: str
    lam: float = 0.0
    radius: float = math.inf

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown regularizer kind {self.kind!r}")
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.kind in ("l1", "l1_box") and not math.isfinite(self.lam):
            raise ValueError("lam must be finite")
        if self.kind in ("box", "l1_box") and not math.isfinite(self.radius):
            raise ValueError("radius must be finite for box kinds")

    @staticmethod
    def zero() -> "Regularizer":
        return Regularizer("zero")

    @staticmethod
    def l1(lam: float) -> "Regularizer":
        return Regularizer("l1", lam=lam)

    @staticmethod
    def box(radius: float) -> "Regularizer":
        return Regularizer("box", radius=radius)

    # the indicator of a box and the box constraint are the same object
    indicator_box = box

    @staticmethod
    def l1_box(lam: float, radius: float) -> "Regularizer":
        return Regularizer("l1_box", lam=lam, radius=radius)

    @property
    def has_box(self) -> bool:
        return self.kind in ("box", "l1_box")


def soft_threshold(v: np.ndarray, tau: float) -> np.ndarray:
    """Componentwise sign(v) * max(|v| - tau, 0).

    Ties at |v_i| == tau resolve to exactly 0 through the max.
    """
    return np.sign(v) * np.maximum(np.abs(v) - tau, 0.0)


def prox(reg: Regularizer, step: float, v: np.ndarray) -> np.ndarray:
    """Evaluate prox_{step*h}(v) = argmin_z { h(z) + ||z - v||^2 / (2*step) }.

    Parameters
    ----------
    reg : Regularizer
        The function h.
    step : float
        Positive prox step.
    v : ndarray
        Query point; must be finite componentwise.

    Returns
    -------
    ndarray
        The unique minimizer.  For the l1+box kind this is
        soft-thresholding followed by clamping to [-radius, radius], which
        is exact because h is separable and the box is a symmetric interval
        containing 0.
    """
    if not step > 0:
        raise ValueError(f"prox step must be positive, got {step}")
    v = np.asarray(v, dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise ValueError("prox input contains non-finite components")
    if reg.kind == "zero":
        return v.copy()
    if reg.kind == "l1":
        return soft_threshold(v, step * reg.lam)
    if reg.kind == "box":
        return np.clip(v, -reg.radius, reg.radius)
    # l1_box
    return np.clip(soft_threshold(v, step * reg.lam), -reg.radius, reg.radius)


def reg_value(reg: Regularizer, x: np.ndarray) -> float:
    """Evaluate h(x); returns math.inf outside the box domain."""
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("reg_value input contains non-finite components")
    if reg.kind == "zero":
        return 0.0
    if reg.has_box and np.max(np.abs(x), initial=0.0) > reg.radius:
        return math.inf
    if reg.kind == "box":
        return 0.0
    return float(reg.lam * np.sum(np.abs(x)))


def prox_scalar_grid(
    h_scalar: Callable[[float], float],
    step: float,
    v: float,
    lo: float,
    hi: float,
    n: int = 100_000,
) -> float:
    """Brute-force 1-D prox: minimize h(z) + (z - v)^2 / (2*step) over a
    uniform grid on [lo, hi], then refine once around the winner.

    The caller must pick [lo, hi] wide enough to contain the true minimizer;
    the result is then within one (refined) grid spacing of it.
    """
    if n < 1:
        raise ValueError("grid must contain at least one point")
    if not step > 0:
        raise ValueError("prox step must be positive")
    if not hi > lo:
        raise ValueError("empty grid interval")

    def objective(z: np.ndarray) -> np.ndarray:
        hvals = np.array([h_scalar(float(zi)) for zi in z])
        return hvals + (z - v) ** 2 / (2.0 * step)

    grid = np.linspace(lo, hi, n)
    best = grid[int(np.argmin(objective(grid)))]
    spacing = (hi - lo) / max(n - 1, 1)
    fine = np.linspace(best - spacing, best + spacing, n)
    return float(fine[int(np.argmin(objective(fine)))])
