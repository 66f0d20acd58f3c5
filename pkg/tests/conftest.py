"""Shared fixtures: desk datasets, objectives, and the reference optimum.

Expensive artifacts (the reference solve) are session-scoped so the
acceptance criteria share one computation.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from adaprox import (Logistic, Regularizer, TanhSvm, compute_reference,
                     normalize_rows, synthetic_classification)

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURE_LIBSVM = REPO_ROOT / "data" / "desk_class.libsvm"

# frozen desk datasets used across tests and acceptance criteria
DESK_LOGISTIC_SPEC = "synthetic:n=200,d=20,margin=0.1,flip=0.0,seed=7"
DESK_SVM_SPEC = "synthetic:n=300,d=20,margin=0.0,flip=0.3,seed=11"


def desk_logistic_dataset():
    return normalize_rows(
        synthetic_classification(200, 20, margin=0.1, flip=0.0, seed=7))


def desk_svm_dataset():
    return normalize_rows(
        synthetic_classification(300, 20, margin=0.0, flip=0.3, seed=11))


@pytest.fixture(scope="session")
def desk_logistic():
    ds = desk_logistic_dataset()
    return ds, Logistic(ds), Regularizer.l1_box(1e-3, 50.0)


@pytest.fixture(scope="session")
def desk_svm():
    ds = desk_svm_dataset()
    return ds, TanhSvm(ds, mu=1e-3), Regularizer.l1_box(1e-3, 50.0)


@pytest.fixture(scope="session")
def logistic_reference(desk_logistic):
    _, objective, reg = desk_logistic
    return compute_reference(objective, reg, 30_000, eta=10.0, gamma=1.0, seed=0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
