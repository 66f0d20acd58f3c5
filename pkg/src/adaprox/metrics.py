"""Trace records, the reference-optimum solve, and rate-slope fitting."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .oracle import BatchSchedule, GradientOracle
from .prox import Regularizer, prox, reg_value
from .solvers import AccAdaProx

__all__ = [
    "TraceRecord",
    "CSV_HEADER",
    "format_record",
    "Reference",
    "compute_reference",
    "fit_loglog_slope",
]

CSV_HEADER = "k,epochs,wall_s,F,F_avg,subopt,gradmap,avg_sq_gradmap,S,step,batch,test_acc"


@dataclass
class TraceRecord:
    """One emitted row of per-iteration metrics.

    Cheap fields (k, epochs, S, step, batch) are present every iteration;
    full-gradient metrics (F, F_avg, subopt, gradmap, test_acc) are populated
    at the metric cadence.  ``avg_sq_gradmap`` is the running mean of
    squared recorded mapping norms, carried forward between cadence rows.
    """

    k: int
    epochs: float
    wall_s: Optional[float] = None
    F: Optional[float] = None
    F_avg: Optional[float] = None
    subopt: Optional[float] = None
    gradmap: Optional[float] = None
    avg_sq_gradmap: float = 0.0
    S: Optional[float] = None
    step: Optional[float] = None
    batch: Optional[int] = None
    test_acc: Optional[float] = None


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def format_record(rec: TraceRecord) -> str:
    return ",".join(
        (
            str(rec.k),
            _fmt(rec.epochs),
            _fmt(rec.wall_s),
            _fmt(rec.F),
            _fmt(rec.F_avg),
            _fmt(rec.subopt),
            _fmt(rec.gradmap),
            _fmt(rec.avg_sq_gradmap),
            _fmt(rec.S),
            _fmt(rec.step),
            _fmt(rec.batch),
            _fmt(rec.test_acc),
        )
    )


@dataclass(frozen=True)
class Reference:
    """A certified approximate optimum.

    ``tol_ref`` is an empirical stall certificate: the largest objective
    decrease any reference run still achieved over its last decade of
    iterations.  Suboptimality values below this slack sit at the reference
    floor and should not be rate-fitted.
    """

    f_ref: float
    x_ref: np.ndarray
    tol_ref: float
    meta: dict


def compute_reference(
    objective,
    reg: Regularizer,
    budget: int = 20_000,
    *,
    eta: float = 10.0,
    gamma: float = 1.0,
    seed: int = 0,
) -> Reference:
    """Approximate F* for a convex problem by long deterministic accelerated
    solves from three starts (zero plus two seeded random points in dom h),
    taking the minimum objective over every evaluated iterate.

    Raises ValueError for nonconvex objectives, where F* is undefined as a
    target.
    """
    if not getattr(objective, "is_convex", False):
        raise ValueError("reference optimum undefined for nonconvex objectives")
    if budget < 10:
        raise ValueError("reference budget too small")

    d = objective.dim
    rng = np.random.default_rng(seed)
    starts = [np.zeros(d)]
    for _ in range(2):
        p = rng.standard_normal(d)
        starts.append(prox(reg, 1.0, p))  # project into dom(h)

    best_f = math.inf
    best_x = starts[0]
    tol_ref = 0.0
    decile = budget // 10
    for x0 in starts:
        oracle = GradientOracle(objective, BatchSchedule.full(), seed)
        solver = AccAdaProx(objective, reg, oracle, eta=eta, gamma=gamma, x0=x0)
        run_best = objective.value(x0) + reg_value(reg, x0)
        run_best_x = x0
        best_at_decile = run_best
        for k in range(1, budget + 1):
            solver.step()
            f = objective.value(solver.y) + reg_value(reg, solver.y)
            if f < run_best:
                run_best = f
                run_best_x = solver.y.copy()
            if k == decile:
                best_at_decile = run_best
        tol_ref = max(tol_ref, best_at_decile - run_best)
        if run_best < best_f:
            best_f = run_best
            best_x = run_best_x
    tol_ref = max(tol_ref, 1e-12 * (1.0 + abs(best_f)))
    meta = {"budget": budget, "eta": eta, "gamma": gamma, "seed": seed,
            "starts": len(starts)}
    return Reference(best_f, best_x, tol_ref, meta)


def fit_loglog_slope(series: Sequence[tuple[float, float]], window: float) -> float:
    """Least-squares slope of log(value) against log(t) over the last
    ``window`` fraction (by count) of the positive entries.

    Values at or below the numerical floor 1e-13 * max(value) are excluded.
    Requires at least 10 points in the window.
    """
    if not 0 < window <= 1:
        raise ValueError("window must lie in (0, 1]")
    pts = [(t, v) for t, v in series if t > 0 and math.isfinite(v) and v > 0]
    if not pts:
        raise ValueError("no positive points to fit")
    floor = 1e-13 * max(v for _, v in pts)
    pts = [(t, v) for t, v in pts if v > floor]
    count = math.ceil(window * len(pts))
    tail = pts[-count:]
    if len(tail) < 10:
        raise ValueError(f"only {len(tail)} points in fit window, need >= 10")
    logt = np.log([t for t, _ in tail])
    logv = np.log([v for _, v in tail])
    slope = np.polyfit(logt, logv, 1)[0]
    return float(slope)
