"""Gradient oracles: deterministic full gradients or seeded mini-batches.

Batch indices are sampled uniformly WITH replacement (i.i.d. draws), so the
averaged estimator is unbiased with variance sigma^2 / b.  The oracle counts
per-sample gradient evaluations; diagnostics (``noise``) and harness metrics
bypass the counter so epochs reflect solver work only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["BatchSchedule", "GradientOracle"]


@dataclass(frozen=True)
class BatchSchedule:
    """Batch-size rule b_k; emitted sizes always satisfy 1 <= b_k <= n."""

    kind: str  # "full" | "constant" | "fraction" | "sqrt_growth"
    size: int = 0
    fraction: float = 0.0
    growth: float = 0.0

    def __post_init__(self) -> None:
        if self.kind == "constant" and self.size < 1:
            raise ValueError("constant batch size must be >= 1")
        if self.kind == "fraction" and not 0.0 < self.fraction <= 1.0:
            raise ValueError("batch fraction must lie in (0, 1]")
        if self.kind == "sqrt_growth" and not self.growth > 0:
            raise ValueError("sqrt growth constant must be positive")
        if self.kind not in ("full", "constant", "fraction", "sqrt_growth"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")

    @staticmethod
    def full() -> "BatchSchedule":
        return BatchSchedule("full")

    @staticmethod
    def constant(b: int) -> "BatchSchedule":
        return BatchSchedule("constant", size=b)

    @staticmethod
    def fraction_of_train(p: float) -> "BatchSchedule":
        return BatchSchedule("fraction", fraction=p)

    @staticmethod
    def sqrt_growth(c: float) -> "BatchSchedule":
        return BatchSchedule("sqrt_growth", growth=c)

    @staticmethod
    def parse(spec: str) -> "BatchSchedule":
        """Parse "full", an integer, "frac:<p>", or "sqrt:<c>"."""
        spec = spec.strip()
        if spec == "full":
            return BatchSchedule.full()
        if spec.startswith("frac:"):
            return BatchSchedule.fraction_of_train(float(spec[5:]))
        if spec.startswith("sqrt:"):
            return BatchSchedule.sqrt_growth(float(spec[5:]))
        if spec.startswith("constant:"):
            return BatchSchedule.constant(int(spec[9:]))
        try:
            return BatchSchedule.constant(int(spec))
        except ValueError:
            raise ValueError(f"unparseable batch schedule {spec!r}") from None

    def spec_string(self) -> str:
        if self.kind == "full":
            return "full"
        if self.kind == "constant":
            return f"constant:{self.size}"
        if self.kind == "fraction":
            return f"frac:{self.fraction!r}"
        return f"sqrt:{self.growth!r}"

    def batch_size(self, k: int, n: int) -> int:
        if k < 1:
            raise ValueError("iteration index starts at 1")
        if self.kind == "full":
            return n
        if self.kind == "constant":
            return min(self.size, n)
        if self.kind == "fraction":
            return min(n, max(1, math.ceil(self.fraction * n)))
        return min(n, math.ceil(self.growth * math.sqrt(k)))


class GradientOracle:
    """Unified access to full and mini-batch gradients of one objective.

    One oracle instance belongs to one solver run; it is not safe for
    concurrent mutation.  Replaying from the same seed reproduces every
    returned gradient bitwise.
    """

    def __init__(self, objective, schedule: BatchSchedule, seed: int):
        self.objective = objective
        self.schedule = schedule
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.evals = 0  # per-sample gradient evaluations consumed so far

    @property
    def is_full(self) -> bool:
        return self.schedule.kind == "full"

    def query(self, x: np.ndarray, k: int) -> tuple[np.ndarray, int]:
        """Return (g_k, b_k) for iteration k, advancing the sampling state."""
        n = self.objective.n
        b = self.schedule.batch_size(k, n)
        if self.is_full:
            g = self.objective.gradient(x)
        else:
            idx = self.rng.integers(0, n, size=b)
            g = self.objective.batch_gradient(x, idx)
        self.evals += b
        return g, b

    def noise(self, x: np.ndarray, g: np.ndarray) -> np.ndarray:
        """Diagnostic: full gradient minus the estimate (costs a full pass,
        not charged to the epoch counter)."""
        return self.objective.gradient(x) - g

    def epochs_elapsed(self) -> float:
        return self.evals / self.objective.n

    def state_dict(self) -> dict:
        return {
            "evals": self.evals,
            "seed": self.seed,
            "rng": self.rng.bit_generator.state,
        }

    def load_state_dict(self, state: dict) -> None:
        self.evals = int(state["evals"])
        self.seed = int(state["seed"])
        self.rng = np.random.default_rng()
        self.rng.bit_generator.state = state["rng"]
