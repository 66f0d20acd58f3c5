"""Adaptive proximal gradient solvers for composite problems.

The step size eta_k = eta / S_k divides a fixed numerator by an accumulator
of squared gradient-mapping norms, S_k^2 = gamma^2 + sum_{j<k} ||G_j||^2, so
the method needs no smoothness constant and handles nonconvex smooth, convex
smooth, and convex nonsmooth objectives with one rule.  An accelerated
variant and the classical proximal gradient baseline ship alongside, plus a
benchmark harness (CLI: ``adaprox solve|bench|verify|data``).
"""
from .config import ConfigError, RunConfig, config_to_text, parse_config_text, resolve_config
from .gradmap import GradMapResult, gradient_mapping, stationarity_metric
from .metrics import Reference, TraceRecord, compute_reference, fit_loglog_slope
from .oracle import BatchSchedule, GradientOracle
from .problems import (DataError, Dataset, Logistic, Quadratic, TanhSvm,
                       binarize_mnist, dataset_checksum, load_libsvm,
                       normalize_rows, split_train_test, subsample,
                       synthetic_classification, accuracy, write_libsvm)
from .prox import Regularizer, prox, prox_scalar_grid, reg_value, soft_threshold
from .runner import RunResult, execute, run_to_files
from .solvers import (AccAdaProx, AdaProx, PgStepRule, ProxGradient, StepInfo,
                      estimate_smoothness)

__version__ = "0.1.0"

__all__ = [
    "AccAdaProx",
    "AdaProx",
    "BatchSchedule",
    "ConfigError",
    "DataError",
    "Dataset",
    "GradMapResult",
    "GradientOracle",
    "Logistic",
    "PgStepRule",
    "ProxGradient",
    "Quadratic",
    "Reference",
    "Regularizer",
    "RunConfig",
    "RunResult",
    "StepInfo",
    "TanhSvm",
    "TraceRecord",
    "binarize_mnist",
    "compute_reference",
    "config_to_text",
    "dataset_checksum",
    "estimate_smoothness",
    "execute",
    "fit_loglog_slope",
    "gradient_mapping",
    "load_libsvm",
    "normalize_rows",
    "parse_config_text",
    "prox",
    "prox_scalar_grid",
    "reg_value",
    "resolve_config",
    "run_to_files",
    "soft_threshold",
    "split_train_test",
    "stationarity_metric",
    "subsample",
    "synthetic_classification",
    "accuracy",
    "write_libsvm",
]
