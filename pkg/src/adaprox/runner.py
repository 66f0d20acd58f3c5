"""Execute a RunConfig: assemble data, problem, solver; loop; emit files.

The CSV trace has one row per iteration plus an initial row for the starting
point.  Full-gradient metrics are populated on the initial row, every
``metric_cadence``-th row, and the final row, so the number of
metric-populated rows is 1 + ceil(budget / cadence) for iteration budgets.

Reruns with an identical config and seed produce byte-identical CSVs; the
optional wall-clock column is left empty unless ``record_wall`` is set, since
timing would break that contract.  Total wall time always lands in the
sidecar JSON, which carries the resolved config, dataset checksum, and
reference metadata.
"""
from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import problems
from .config import ConfigError, RunConfig, config_to_text
from .gradmap import stationarity_metric
from .metrics import CSV_HEADER, Reference, TraceRecord, compute_reference, format_record
from .oracle import BatchSchedule, GradientOracle
from .prox import Regularizer, prox, reg_value
from .solvers import AccAdaProx, AdaProx, PgStepRule, ProxGradient, estimate_smoothness

__all__ = ["RunResult", "execute", "run_to_files", "regularizer_from_config",
           "prepare_data", "build_objective", "data_dir", "DATA_DIR_ENV"]

DATA_DIR_ENV = "ADAPROX_DATA_DIR"


@dataclass
class RunResult:
    config: RunConfig
    records: list[TraceRecord]
    sidecar: dict
    reference: Optional[Reference]

    def final(self) -> TraceRecord:
        return self.records[-1]

    def record_at(self, k: int) -> TraceRecord:
        for rec in self.records:
            if rec.k == k:
                return rec
        raise KeyError(f"no trace row at k={k}")


def data_dir() -> Optional[Path]:
    env = os.environ.get(DATA_DIR_ENV)
    return Path(env) if env else None


def _resolve_dataset_path(spec: str) -> Path:
    path = Path(spec)
    if path.is_file():
        return path
    base = data_dir()
    if base is not None and (base / spec).is_file():
        return base / spec
    raise problems.DataError(f"dataset file not found: {spec}"
                             + (f" (also tried {base / spec})" if base else ""))


def _parse_synthetic(spec: str) -> dict:
    params = {"n": 200, "d": 20, "margin": 0.1, "flip": 0.0, "seed": 7}
    body = spec[len("synthetic:"):]
    if body:
        for part in body.split(","):
            key, sep, value = part.partition("=")
            key = key.strip()
            if not sep or key not in params:
                raise ConfigError(f"key 'dataset': bad synthetic parameter {part!r}")
            try:
                params[key] = int(value) if key in ("n", "d", "seed") else float(value)
            except ValueError:
                raise ConfigError(f"key 'dataset': bad synthetic value {part!r}") from None
    if params["n"] < 2 or params["d"] < 1:
        raise ConfigError("key 'dataset': synthetic needs n >= 2 and d >= 1")
    return params


def prepare_data(cfg: RunConfig) -> tuple[problems.Dataset, Optional[problems.Dataset], dict]:
    """Load or synthesize, then normalize, subsample and split.

    Returns (train, test-or-None, metadata with checksum).
    """
    if cfg.dataset.startswith("synthetic:"):
        params = _parse_synthetic(cfg.dataset)
        ds = problems.synthetic_classification(
            params["n"], params["d"], margin=params["margin"],
            flip=params["flip"], seed=params["seed"])
        source = cfg.dataset
        checksum = problems.dataset_checksum(ds)
    else:
        path = _resolve_dataset_path(cfg.dataset)
        ds = problems.load_libsvm(path, label_rule=cfg.label_rule, dim=cfg.dim)
        source = str(path)
        checksum = problems.file_checksum(path)

    if cfg.normalize:
        ds = problems.normalize_rows(ds)
    if cfg.subsample:
        if cfg.subsample > ds.n:
            raise problems.DataError(
                f"subsample={cfg.subsample} exceeds dataset size {ds.n}")
        ds = problems.subsample(ds, cfg.subsample, cfg.seed)
    if cfg.train_frac < 1.0:
        train, test = problems.split_train_test(ds, cfg.train_frac, cfg.seed)
    else:
        train, test = ds, None

    meta = {
        "source": source,
        "checksum": checksum,
        "n": ds.n,
        "d": ds.d,
        "n_train": train.n,
        "n_test": test.n if test is not None else 0,
    }
    return train, test, meta


def build_objective(cfg: RunConfig, train: problems.Dataset):
    if cfg.problem == "svm":
        return problems.TanhSvm(train, mu=cfg.mu)
    return problems.Logistic(train)


def regularizer_from_config(cfg: RunConfig) -> Regularizer:
    if cfg.radius is None:
        return Regularizer.l1(cfg.lam) if cfg.lam > 0 else Regularizer.zero()
    if cfg.lam > 0:
        return Regularizer.l1_box(cfg.lam, cfg.radius)
    return Regularizer.box(cfg.radius)


def _initial_point(cfg: RunConfig, dim: int, reg: Regularizer) -> np.ndarray:
    if cfg.init == "zero":
        return np.zeros(dim)
    scale = float(cfg.init.split(":", 1)[1])
    point = scale * np.random.default_rng(cfg.seed + 1).standard_normal(dim)
    return prox(reg, 1.0, point)  # project into dom(h)


def _resolve_pg_rule(cfg: RunConfig, objective) -> tuple[PgStepRule, Optional[float]]:
    spec = cfg.pg_step
    if spec.startswith("invsqrt:"):
        return PgStepRule("inv_sqrt", float(spec[8:])), None
    if spec.endswith("/L"):
        lhat = estimate_smoothness(objective, seed=cfg.seed)
        return PgStepRule("constant", float(spec[:-2]) / lhat), lhat
    return PgStepRule("constant", float(spec)), None


def _build_solver(cfg: RunConfig, objective, reg: Regularizer):
    x0 = _initial_point(cfg, objective.dim, reg)
    lhat = None
    if cfg.algorithm == "pg":
        rule, lhat = _resolve_pg_rule(cfg, objective)
        return ProxGradient(objective, reg, step_rule=rule, x0=x0), lhat
    oracle = GradientOracle(objective, BatchSchedule.parse(cfg.batch), cfg.seed)
    cls = AdaProx if cfg.algorithm == "adaprox" else AccAdaProx
    return cls(objective, reg, oracle, eta=cfg.eta, gamma=cfg.gamma, x0=x0), lhat


class _MetricTracker:
    """Accumulates the running mean of squared recorded mapping norms."""

    def __init__(self) -> None:
        self.sq_sum = 0.0
        self.count = 0

    def record(self, gradmap_norm: float) -> float:
        self.sq_sum += gradmap_norm * gradmap_norm
        self.count += 1
        return self.sq_sum / self.count

    @property
    def current(self) -> float:
        return self.sq_sum / self.count if self.count else 0.0


def execute(cfg: RunConfig, *, reference: Optional[Reference] = None) -> RunResult:
    """Run a validated config to completion, returning the in-memory trace."""
    t_start = time.perf_counter()
    train, test, data_meta = prepare_data(cfg)
    objective = build_objective(cfg, train)
    reg = regularizer_from_config(cfg)

    if reference is None and cfg.reference == "auto":
        reference = compute_reference(objective, reg, cfg.ref_budget, seed=cfg.seed)

    solver, lhat = _build_solver(cfg, objective, reg)
    oracle = getattr(solver, "oracle", None)

    tracker = _MetricTracker()
    records: list[TraceRecord] = []
    max_step_norm = 0.0
    max_dist_to_ref = 0.0

    def epochs_now() -> float:
        if oracle is not None:
            return oracle.epochs_elapsed()
        return float(solver.k)  # the baseline does one full pass per step

    def metric_fields(rec: TraceRecord) -> None:
        point = solver.report_point
        rec.F = objective.value(point) + reg_value(reg, point)
        avg = solver.averaged_point
        if avg is not None:
            rec.F_avg = objective.value(avg) + reg_value(reg, avg)
        if reference is not None:
            rec.subopt = rec.F - reference.f_ref
        gm = stationarity_metric(point, objective, reg)
        rec.gradmap = gm
        rec.avg_sq_gradmap = tracker.record(gm)
        if test is not None and test.n > 0:
            rec.test_acc = problems.accuracy(test, point)
        if cfg.record_wall:
            rec.wall_s = time.perf_counter() - t_start

    initial = TraceRecord(k=0, epochs=0.0, S=getattr(solver, "S", None),
                          step=_planned_first_step(cfg, solver))
    metric_fields(initial)
    records.append(initial)

    done = cfg.budget_iters == 0
    while not done:
        info = solver.step()
        if cfg.budget_iters is not None:
            done = info.k >= cfg.budget_iters
        else:
            done = epochs_now() >= cfg.budget_epochs
        rec = TraceRecord(
            k=info.k,
            epochs=epochs_now(),
            S=info.s if info.s is not None else getattr(solver, "S", None),
            step=info.step_size,
            batch=info.batch,
            avg_sq_gradmap=tracker.current,
        )
        max_step_norm = max(max_step_norm, info.step_norm)
        if reference is not None:
            anchor = getattr(solver, "z", solver.report_point)
            max_dist_to_ref = max(
                max_dist_to_ref, float(np.linalg.norm(anchor - reference.x_ref)))
        if info.k % cfg.metric_cadence == 0 or done:
            metric_fields(rec)
        records.append(rec)

    sidecar = {
        "version": 1,
        "config": config_to_text(cfg).splitlines(),
        "seed": cfg.seed,
        "dataset": data_meta,
        "metric_cadence": cfg.metric_cadence,
        "budget_iters_effective": records[-1].k,
        "epochs_effective": records[-1].epochs,
        "smoothness_estimate": lhat,
        "reference": None if reference is None else {
            "f_ref": reference.f_ref,
            "tol_ref": reference.tol_ref,
            **reference.meta,
        },
        "assumption_tracking": {
            "max_step_norm": max_step_norm,
            "max_dist_to_ref": max_dist_to_ref if reference is not None else None,
        },
        "wall_s_total": time.perf_counter() - t_start,
    }
    return RunResult(cfg, records, sidecar, reference)


def _planned_first_step(cfg: RunConfig, solver) -> Optional[float]:
    if cfg.algorithm == "pg":
        return solver.step_rule.at(1)
    return cfg.eta / cfg.gamma


def sidecar_path(output: str | Path) -> Path:
    output = Path(output)
    if output.suffix == ".csv":
        return output.with_suffix(".json")
    return output.with_name(output.name + ".json")


def write_trace_csv(path: str | Path, records: list[TraceRecord]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for rec in records:
            fh.write(format_record(rec) + "\n")


def run_to_files(cfg: RunConfig, *, reference: Optional[Reference] = None) -> RunResult:
    """Execute and write the trace CSV plus the sidecar JSON."""
    if not cfg.output:
        raise ConfigError("key 'output': required to write run files")
    result = execute(cfg, reference=reference)
    write_trace_csv(cfg.output, result.records)
    side = sidecar_path(cfg.output)
    with side.open("w", encoding="utf-8") as fh:
        json.dump(result.sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return result


def load_trace_csv(path: str | Path) -> list[TraceRecord]:
    """Read back a trace CSV into records (empty fields become None)."""
    rows: list[TraceRecord] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected trace header {header!r}")
        for line in fh:
            parts = line.rstrip("\n").split(",")
            opt = lambda s: None if s == "" else float(s)
            rows.append(TraceRecord(
                k=int(parts[0]),
                epochs=float(parts[1]),
                wall_s=opt(parts[2]),
                F=opt(parts[3]),
                F_avg=opt(parts[4]),
                subopt=opt(parts[5]),
                gradmap=opt(parts[6]),
                avg_sq_gradmap=float(parts[7]),
                S=opt(parts[8]),
                step=opt(parts[9]),
                batch=None if parts[10] == "" else int(parts[10]),
                test_acc=opt(parts[11]),
            ))
    return rows
