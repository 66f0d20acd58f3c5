"""Datasets in LIBSVM format and the two benchmark objectives.

The smooth parts are

* a nonconvex tanh hinge: f(x) = mean_i [1 - tanh(b_i <x, a_i>)] + mu/2 ||x||^2
* binary logistic loss:   f(x) = mean_i log(1 + exp(-b_i <x, a_i>))

plus a quadratic objective used by tests and reference checks.  Batch
gradients average per-sample loss gradients; the mu-ridge of the tanh
objective is deterministic and is added once, never sampled.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy import sparse
from scipy.special import expit

__all__ = [
    "DataError",
    "Dataset",
    "load_libsvm",
    "write_libsvm",
    "binarize_mnist",
    "normalize_rows",
    "split_train_test",
    "subsample",
    "synthetic_classification",
    "dataset_checksum",
    "file_checksum",
    "row_norms",
    "accuracy",
    "TanhSvm",
    "Logistic",
    "Quadratic",
]

# keep a dense copy of the features below this element count; singleton-batch
# gradients are an order of magnitude faster off the dense array
_DENSE_CACHE_LIMIT = 2_000_000


class DataError(ValueError):
    """Unreadable or malformed dataset input."""


@dataclass
class Dataset:
    """Sparse feature rows plus +-1 labels.

    Treated as immutable after construction: all transforms return a new
    Dataset, so concurrent readers are safe.
    """

    features: sparse.csr_matrix
    labels: np.ndarray

    def __post_init__(self) -> None:
        self.labels = np.asarray(self.labels, dtype=np.float64)
        if self.features.shape[0] != self.labels.shape[0]:
            raise DataError("feature/label row-count mismatch")
        self._dense: Optional[np.ndarray] = None
        if self.features.shape[0] * self.features.shape[1] <= _DENSE_CACHE_LIMIT:
            self._dense = self.features.toarray()

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def dense(self) -> Optional[np.ndarray]:
        return self._dense


def binarize_mnist(labels: Sequence[int]) -> np.ndarray:
    """Map digit labels to +-1: digits 0-4 become -1, digits 5-9 become +1."""
    arr = np.asarray(labels)
    if arr.size and (np.any(arr < 0) or np.any(arr > 9) or np.any(arr != np.floor(arr))):
        raise DataError("digit labels must be integers in 0..9")
    return np.where(arr >= 5, 1.0, -1.0)


def load_libsvm(
    path: str | Path,
    *,
    label_rule: str = "sign",
    dim: int = 0,
) -> Dataset:
    """Parse a LIBSVM-format text file into a Dataset.

    Each line reads ``<label> <idx>:<val> <idx>:<val> ...`` with 1-based,
    strictly increasing feature indices.  Labels are mapped to +-1: with
    ``label_rule="sign"`` positive values map to +1 and nonpositive to -1;
    with ``label_rule="mnist"`` labels must be digits 0-9 and follow the
    0-4 -> -1, 5-9 -> +1 rule.

    ``dim`` pads the feature dimension beyond the largest index seen
    (files omit trailing all-zero features).  Malformed lines raise
    DataError naming the 1-based line number.
    """
    if label_rule not in ("sign", "mnist"):
        raise ValueError(f"unknown label_rule {label_rule!r}")
    path = Path(path)
    if not path.is_file():
        raise DataError(f"dataset file not found: {path}")

    raw_labels: list[float] = []
    indptr = [0]
    indices: list[int] = []
    values: list[float] = []
    max_index = -1

    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            tokens = line.split()
            try:
                raw_labels.append(float(tokens[0]))
            except ValueError:
                raise DataError(f"line {lineno}: unparseable label {tokens[0]!r}") from None
            prev = -1
            for tok in tokens[1:]:
                idx_s, sep, val_s = tok.partition(":")
                if not sep:
                    raise DataError(f"line {lineno}: malformed entry {tok!r}")
                try:
                    idx = int(idx_s)
                    val = float(val_s)
                except ValueError:
                    raise DataError(f"line {lineno}: malformed entry {tok!r}") from None
                if idx < 1:
                    raise DataError(f"line {lineno}: feature index {idx} is not 1-based")
                if idx - 1 <= prev:
                    raise DataError(f"line {lineno}: feature indices not strictly increasing")
                prev = idx - 1
                indices.append(prev)
                values.append(val)
                max_index = max(max_index, prev)
            indptr.append(len(indices))

    n = len(raw_labels)
    d = max_index + 1
    if dim:
        if dim < d:
            raise DataError(f"dim={dim} smaller than max feature index {d}")
        d = dim

    labels_arr = np.asarray(raw_labels)
    if label_rule == "mnist":
        labels = binarize_mnist(labels_arr)
    else:
        labels = np.where(labels_arr > 0, 1.0, -1.0)

    mat = sparse.csr_matrix(
        (np.asarray(values, dtype=np.float64), np.asarray(indices, dtype=np.int32), np.asarray(indptr, dtype=np.int64)),
        shape=(n, d),
    )
    return Dataset(mat, labels)


def write_libsvm(ds: Dataset, path: str | Path) -> None:
    """Write a Dataset in LIBSVM text format (1-based indices, %.17g values)."""
    X = ds.features
    with Path(path).open("w", encoding="utf-8") as fh:
        for i in range(ds.n):
            start, end = X.indptr[i], X.indptr[i + 1]
            parts = [f"{int(ds.labels[i]):+d}"]
            parts.extend(
                f"{X.indices[j] + 1}:{X.data[j]:.17g}" for j in range(start, end)
            )
            fh.write(" ".join(parts) + "\n")


def row_norms(ds: Dataset) -> np.ndarray:
    sq = np.asarray(ds.features.power(2).sum(axis=1)).ravel()
    return np.sqrt(sq)


def normalize_rows(ds: Dataset) -> Dataset:
    """Scale each nonzero row to unit L2 norm; zero rows are left alone."""
    norms = row_norms(ds)
    scale = np.where(norms > 0, 1.0 / np.where(norms > 0, norms, 1.0), 1.0)
    scaled = sparse.diags(scale) @ ds.features
    return Dataset(scaled.tocsr(), ds.labels.copy())


def split_train_test(ds: Dataset, train_frac: float, seed: int) -> tuple[Dataset, Dataset]:
    """Deterministic permutation split: first floor(train_frac*n) rows train."""
    if not 0.0 < train_frac < 1.0:
        raise ValueError("train_frac must lie in (0, 1)")
    if ds.n < 2:
        raise DataError("need at least 2 samples to split")
    perm = np.random.default_rng(seed).permutation(ds.n)
    cut = int(np.floor(train_frac * ds.n))
    train_idx, test_idx = perm[:cut], perm[cut:]
    return (
        Dataset(ds.features[train_idx].tocsr(), ds.labels[train_idx]),
        Dataset(ds.features[test_idx].tocsr(), ds.labels[test_idx]),
    )


def subsample(ds: Dataset, m: int, seed: int) -> Dataset:
    """Keep m rows chosen by a seeded permutation (without replacement)."""
    if not 0 < m <= ds.n:
        raise DataError(f"subsample size {m} not in 1..{ds.n}")
    idx = np.random.default_rng(seed).permutation(ds.n)[:m]
    return Dataset(ds.features[idx].tocsr(), ds.labels[idx])


def synthetic_classification(
    n: int,
    d: int,
    *,
    margin: float = 0.1,
    flip: float = 0.0,
    seed: int = 0,
) -> Dataset:
    """Seeded linearly separable data with unit-norm rows and a margin.

    Rows are rejected-sampled standard normals normalized to unit norm with
    |<w, a_i>| >= margin for a random unit w; labels are sign(<w, a_i>),
    after which a `flip` fraction is flipped to inject label noise.
    """
    if not 0 <= flip < 1:
        raise ValueError("flip must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(d)
    w /= np.linalg.norm(w)
    rows = np.empty((n, d))
    count = 0
    while count < n:
        cand = rng.standard_normal((2 * (n - count), d))
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        keep = np.abs(cand @ w) >= margin
        take = cand[keep][: n - count]
        rows[count : count + take.shape[0]] = take
        count += take.shape[0]
    labels = np.where(rows @ w >= 0, 1.0, -1.0)
    if flip > 0:
        mask = rng.random(n) < flip
        labels[mask] *= -1.0
    return Dataset(sparse.csr_matrix(rows), labels)


def dataset_checksum(ds: Dataset) -> str:
    """SHA-256 over a canonical byte serialization of the dataset."""
    h = hashlib.sha256()
    h.update(b"adaprox-dataset-v1")
    h.update(np.asarray([ds.n, ds.d], dtype=np.int64).tobytes())
    h.update(ds.labels.tobytes())
    h.update(ds.features.indptr.astype(np.int64).tobytes())
    h.update(ds.features.indices.astype(np.int64).tobytes())
    h.update(ds.features.data.astype(np.float64).tobytes())
    return h.hexdigest()


def file_checksum(path: str | Path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def accuracy(ds: Dataset, x: np.ndarray) -> float:
    """Fraction of samples with sign(<x, a_i>) == b_i; sign(0) counts as +1."""
    if ds.n == 0:
        raise DataError("accuracy undefined on an empty dataset")
    scores = ds.features @ x
    preds = np.where(scores >= 0, 1.0, -1.0)
    return float(np.mean(preds == ds.labels))


class _MarginObjective:
    """Shared machinery for losses of the margin m_i = b_i <x, a_i>."""

    is_convex = False

    def __init__(self, ds: Dataset):
        self.dataset = ds

    @property
    def n(self) -> int:
        return self.dataset.n

    @property
    def dim(self) -> int:
        return self.dataset.d

    def _margins(self, x: np.ndarray, idx: Optional[np.ndarray]):
        dense = self.dataset.dense()
        if idx is None:
            A = dense if dense is not None else self.dataset.features
            b = self.dataset.labels
        else:
            A = dense[idx] if dense is not None else self.dataset.features[idx]
            b = self.dataset.labels[idx]
        return A, b, b * (A @ x)

    def _weighted_feature_mean(self, A, w: np.ndarray) -> np.ndarray:
        g = A.T @ w
        return np.asarray(g).ravel() / w.shape[0]


class TanhSvm(_MarginObjective):
    """f(x) = mean_i [1 - tanh(b_i <x, a_i>)] + mu/2 ||x||^2 (nonconvex)."""

    is_convex = False

    def __init__(self, ds: Dataset, mu: float = 0.0):
        super().__init__(ds)
        if mu < 0:
            raise ValueError("mu must be nonnegative")
        self.mu = mu

    def value(self, x: np.ndarray) -> float:
        _, _, m = self._margins(x, None)
        return float(np.mean(1.0 - np.tanh(m)) + 0.5 * self.mu * np.dot(x, x))

    def batch_gradient(self, x: np.ndarray, idx: Optional[np.ndarray]) -> np.ndarray:
        if idx is not None:
            idx = np.asarray(idx)
            if idx.size == 0:
                raise ValueError("batch indices must be nonempty")
            if np.any(idx < 0) or np.any(idx >= self.n):
                raise IndexError("batch index out of range")
        A, b, m = self._margins(x, idx)
        t = np.tanh(m)
        w = -(1.0 - t * t) * b
        # the deterministic mu-ridge is added in full, never sampled
        return self._weighted_feature_mean(A, w) + self.mu * x

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self.batch_gradient(x, None)

    def analytic_smoothness(self) -> float:
        # max |d^2/dm^2 (1 - tanh m)| = 4 / (3 sqrt(3)), times the Frobenius
        # bound on the feature second moment, plus the ridge curvature
        curv = 4.0 / (3.0 * np.sqrt(3.0))
        return float(curv * np.mean(row_norms(self.dataset) ** 2) + self.mu)


class Logistic(_MarginObjective):
    """f(x) = mean_i log(1 + exp(-b_i <x, a_i>)) (convex, smooth)."""

    is_convex = True

    def value(self, x: np.ndarray) -> float:
        _, _, m = self._margins(x, None)
        # logaddexp(0, -m) evaluates log1p(exp(-|m|)) + max(-m, 0) stably
        return float(np.mean(np.logaddexp(0.0, -m)))

    def batch_gradient(self, x: np.ndarray, idx: Optional[np.ndarray]) -> np.ndarray:
        if idx is not None:
            idx = np.asarray(idx)
            if idx.size == 0:
                raise ValueError("batch indices must be nonempty")
            if np.any(idx < 0) or np.any(idx >= self.n):
                raise IndexError("batch index out of range")
        A, b, m = self._margins(x, idx)
        w = -b * expit(-m)
        return self._weighted_feature_mean(A, w)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self.batch_gradient(x, None)

    def analytic_smoothness(self) -> float:
        return float(0.25 * np.mean(row_norms(self.dataset) ** 2))


class Quadratic:
    """f(x) = 0.5 ||x - center||^2; a one-sample objective for tests."""

    is_convex = True

    def __init__(self, center: np.ndarray):
        self.center = np.asarray(center, dtype=np.float64)

    @property
    def n(self) -> int:
        return 1

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def value(self, x: np.ndarray) -> float:
        diff = x - self.center
        return float(0.5 * np.dot(diff, diff))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return x - self.center

    def batch_gradient(self, x: np.ndarray, idx: Optional[np.ndarray]) -> np.ndarray:
        return self.gradient(x)

    def analytic_smoothness(self) -> float:
        return 1.0
