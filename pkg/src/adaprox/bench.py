"""Benchmark suites: predefined sweep structures at two scales.

``desk`` scale substitutes small seeded synthetic datasets so every suite
runs without downloads; ``full`` scale expects the real LIBSVM files under
the data directory (ADAPROX_DATA_DIR or --data-dir) and reproduces the
published sweep structure:

* fig1 - deterministic step-size robustness on the nonconvex hinge
  (adaptive solvers with eta in {1, 10, 100}; baseline with 0.1/L, 1/L,
  10/L), 9 runs.
* fig2 - batch-size sweep {0.1%, 1%, 10%, 50%, full} on the nonconvex hinge
  with an 80/20 split, equal epoch budgets, 5 runs.
* fig3 - eta sweep {0.1, 1, 10, 100} x {adaptive, accelerated} on logistic
  regression with mini-batches and a reference optimum, 8 runs.
* fig4 - logistic regression without the l1 term, adaptive vs accelerated,
  2 runs.
* desk - one quick smoke run per algorithm.

Each run writes ``<name>.csv``/``<name>.json`` into the output directory; a
``summary.json`` collects final metrics and fitted log-log slopes.  Wall
times never enter the summary, so reruns are byte-identical.
"""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

from .config import RunConfig
from .metrics import Reference, compute_reference, fit_loglog_slope
from .problems import DataError
from .runner import (build_objective, data_dir, prepare_data,
                     regularizer_from_config, run_to_files)

__all__ = ["SUITES", "run_suite", "suite_configs"]

SUITES = ("fig1", "fig2", "fig3", "fig4", "desk")

DESK_SVM_DATA = "synthetic:n=500,d=30,margin=0.1,flip=0.05,seed=11"
DESK_LOGISTIC_DATA = "synthetic:n=200,d=20,margin=0.1,flip=0.0,seed=7"

FULL_FILES = {"fig1": "mnist.scale", "fig2": "a9a", "fig3": "w6a", "fig4": "connect4"}


def _dataset_for(suite: str, scale: str, base: Optional[Path]) -> str:
    if scale == "desk":
        return DESK_SVM_DATA if suite in ("fig1", "fig2") else DESK_LOGISTIC_DATA
    name = FULL_FILES[suite]
    root = base or data_dir()
    path = (root / name) if root else Path(name)
    if not path.is_file():
        raise DataError(f"suite {suite} at full scale needs dataset file {path}")
    return str(path)


def suite_configs(suite: str, scale: str, out_dir: Path,
                  base: Optional[Path] = None) -> list[tuple[str, RunConfig]]:
    """Build the named configurations of one suite."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    if scale not in ("desk", "full"):
        raise ValueError(f"unknown scale {scale!r}")
    desk = scale == "desk"
    runs: list[tuple[str, RunConfig]] = []

    if suite == "fig1":
        data = _dataset_for(suite, scale, base)
        common = dict(problem="svm", dataset=data, lam=1e-3, mu=1e-3,
                      radius=50.0, gamma=1.0, batch="full", seed=0,
                      budget_iters=1000 if desk else 10_000,
                      metric_cadence=5 if desk else 10)
        if not desk:
            common.update(label_rule="mnist", dim=780)
        for eta in (1.0, 10.0, 100.0):
            for algo in ("adaprox", "accadaprox"):
                runs.append((f"{algo}_eta{eta:g}",
                             RunConfig(algorithm=algo, eta=eta, **common)))
        for c in (0.1, 1.0, 10.0):
            runs.append((f"pg_{c:g}overL",
                         RunConfig(algorithm="pg", pg_step=f"{c:g}/L", **common)))

    elif suite == "fig2":
        data = _dataset_for(suite, scale, base)
        n_train_frac = 0.8
        common = dict(problem="svm", dataset=data, lam=1e-3, mu=1e-3,
                      radius=50.0, gamma=1.0, eta=10.0, seed=0,
                      algorithm="adaprox", train_frac=n_train_frac,
                      budget_iters=None,
                      budget_epochs=20.0 if desk else 1000.0)
        # cadence approximates one metric row per epoch for each batch size
        for name, batch, cadence in (
            ("b0.1pct", "frac:0.001", 400 if desk else 965),
            ("b1pct", "frac:0.01", 100 if desk else 100),
            ("b10pct", "frac:0.1", 10 if desk else 10),
            ("b50pct", "frac:0.5", 2 if desk else 2),
            ("bfull", "full", 1),
        ):
            runs.append((name, RunConfig(batch=batch, metric_cadence=cadence,
                                         **common)))

    elif suite == "fig3":
        data = _dataset_for(suite, scale, base)
        common = dict(problem="logistic", dataset=data, lam=1e-3, radius=50.0,
                      gamma=1.0, seed=0, reference="auto",
                      ref_budget=20_000 if desk else 50_000,
                      batch="constant:32" if desk else "constant:512",
                      budget_iters=None,
                      budget_epochs=20.0 if desk else 1000.0,
                      metric_cadence=5 if desk else 30)
        for algo in ("adaprox", "accadaprox"):
            for eta in (0.1, 1.0, 10.0, 100.0):
                runs.append((f"{algo}_eta{eta:g}",
                             RunConfig(algorithm=algo, eta=eta, **common)))

    elif suite == "fig4":
        data = _dataset_for(suite, scale, base)
        common = dict(problem="logistic", dataset=data, lam=0.0, radius=None,
                      gamma=1.0, eta=10.0, seed=0, train_frac=0.8,
                      reference="auto", ref_budget=20_000 if desk else 50_000,
                      batch="constant:32" if desk else "constant:512",
                      budget_iters=None,
                      budget_epochs=20.0 if desk else 1000.0,
                      metric_cadence=5 if desk else 30)
        for algo in ("adaprox", "accadaprox"):
            runs.append((algo, RunConfig(algorithm=algo, **common)))

    else:  # desk smoke suite
        runs = [
            ("adaprox_svm", RunConfig(problem="svm", dataset=DESK_SVM_DATA,
                                      algorithm="adaprox", eta=10.0,
                                      budget_iters=200, metric_cadence=5)),
            ("accadaprox_logistic", RunConfig(problem="logistic",
                                              dataset=DESK_LOGISTIC_DATA,
                                              algorithm="accadaprox", eta=10.0,
                                              reference="auto", ref_budget=5000,
                                              budget_iters=200, metric_cadence=5)),
            ("pg_svm", RunConfig(problem="svm", dataset=DESK_SVM_DATA,
                                 algorithm="pg", pg_step="1/L",
                                 budget_iters=200, metric_cadence=5)),
            ("adaprox_logistic_b1", RunConfig(problem="logistic",
                                              dataset=DESK_LOGISTIC_DATA,
                                              algorithm="adaprox", eta=10.0,
                                              batch="constant:1",
                                              budget_iters=400, metric_cadence=20)),
        ]

    named = []
    for name, cfg in runs:
        named.append((name, cfg.with_overrides(output=str(out_dir / f"{name}.csv"))))
    return named


def _series(records, field: str) -> list[tuple[float, float]]:
    out = []
    for rec in records:
        value = getattr(rec, field)
        if rec.k > 0 and value is not None:
            out.append((float(rec.k), float(value)))
    return out


def _summarize_run(name: str, result) -> dict:
    final = result.final()
    entry = {
        "name": name,
        "iters": final.k,
        "epochs": final.epochs,
        "final_F": final.F,
        "final_F_avg": final.F_avg,
        "final_subopt": final.subopt,
        "final_gradmap": final.gradmap,
        "final_avg_sq_gradmap": final.avg_sq_gradmap,
        "final_test_acc": final.test_acc,
    }
    for field, label in (("subopt", "subopt_slope"),
                         ("avg_sq_gradmap", "avg_sq_gradmap_slope")):
        try:
            entry[label] = fit_loglog_slope(_series(result.records, field), 0.5)
        except ValueError:
            entry[label] = None
    return entry


def _run_one(args) -> tuple[str, dict]:
    name, cfg, reference = args
    result = run_to_files(cfg, reference=reference)
    return name, _summarize_run(name, result)


def _shared_reference(configs: list[tuple[str, RunConfig]]) -> Optional[Reference]:
    """Compute the reference once when every run shares problem and data."""
    ref_cfgs = [cfg for _, cfg in configs if cfg.reference == "auto"]
    if not ref_cfgs:
        return None
    probe = ref_cfgs[0]
    key = (probe.problem, probe.dataset, probe.lam, probe.radius, probe.normalize,
           probe.subsample, probe.train_frac, probe.seed, probe.ref_budget)
    for cfg in ref_cfgs[1:]:
        if (cfg.problem, cfg.dataset, cfg.lam, cfg.radius, cfg.normalize,
                cfg.subsample, cfg.train_frac, cfg.seed, cfg.ref_budget) != key:
            return None
    train, _, _ = prepare_data(probe)
    objective = build_objective(probe, train)
    reg = regularizer_from_config(probe)
    return compute_reference(objective, reg, probe.ref_budget, seed=probe.seed)


def run_suite(suite: str, scale: str, out_dir: str | Path, *,
              jobs: int = 1, base: Optional[str | Path] = None) -> dict:
    """Run every configuration of a suite; returns the summary dict."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    configs = suite_configs(suite, scale, out, Path(base) if base else None)
    reference = _shared_reference(configs)

    tasks = [(name, cfg, reference) for name, cfg in configs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = dict(pool.map(_run_one, tasks))
    else:
        results = dict(_run_one(task) for task in tasks)

    # assemble in declared config order regardless of completion order
    summary = {
        "suite": suite,
        "scale": scale,
        "runs": [results[name] for name, _ in configs],
    }
    with (out / "summary.json").open("w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary
