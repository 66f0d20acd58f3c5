"""Run configuration: a flat key = value text format with '#' comments.

Every run is fully described by a RunConfig; serialization is canonical so
parse -> serialize -> parse is the identity.  CLI overrides (``--set k=v``)
are applied on top of the file before validation, and any unknown or invalid
key raises ConfigError naming the offending key.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

__all__ = ["ConfigError", "RunConfig", "parse_config_text", "parse_overrides",
           "resolve_config", "config_to_text"]


class ConfigError(ValueError):
    """Invalid run configuration; message names the offending key."""


_KNOWN_KEYS = (
    "problem",
    "dataset",
    "algorithm",
    "lambda",
    "mu",
    "R",
    "gamma",
    "eta",
    "pg_step",
    "batch",
    "budget_iters",
    "budget_epochs",
    "seed",
    "metric_cadence",
    "train_frac",
    "output",
    "label_rule",
    "normalize",
    "subsample",
    "dim",
    "init",
    "reference",
    "ref_budget",
    "record_wall",
)


@dataclass(frozen=True)
class RunConfig:
    """Typed, validated experiment description.

    Defaults mirror the benchmark setup: R = 50, lambda = mu = 1e-3,
    gamma = 1.  Exactly one of budget_iters / budget_epochs is active.
    """

    problem: str = "svm"  # svm | logistic
    dataset: str = "synthetic:n=200,d=20,margin=0.1,flip=0.0,seed=7"
    algorithm: str = "adaprox"  # adaprox | accadaprox | pg
    lam: float = 1e-3
    mu: float = 1e-3
    radius: Optional[float] = 50.0  # None drops the box constraint
    gamma: float = 1.0
    eta: float = 10.0
    pg_step: str = ""  # "<a>" | "<c>/L" | "invsqrt:<a0>"; required for pg
    batch: str = "full"
    budget_iters: Optional[int] = 1000
    budget_epochs: Optional[float] = None
    seed: int = 0
    metric_cadence: int = 10
    train_frac: float = 1.0  # 1.0 means no test split
    output: str = ""
    label_rule: str = "sign"
    normalize: bool = True
    subsample: int = 0  # 0 disables
    dim: int = 0  # 0 infers from data
    init: str = "zero"  # zero | randn:<scale>
    reference: str = "none"  # none | auto
    ref_budget: int = 20_000
    record_wall: bool = False

    def with_overrides(self, **kwargs) -> "RunConfig":
        return replace(self, **kwargs)


def parse_config_text(text: str) -> dict[str, str]:
    """Parse 'key = value' lines; '#' starts a comment, blank lines skipped."""
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in mapping:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        mapping[key] = value
    return mapping


def parse_overrides(pairs: list[str]) -> dict[str, str]:
    """Parse repeated --set key=value arguments."""
    mapping: dict[str, str] = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"override must be key=value, got {pair!r}")
        mapping[key.strip()] = value.strip()
    return mapping


def _as_float(mapping: dict[str, str], key: str) -> float:
    try:
        return float(mapping[key])
    except ValueError:
        raise ConfigError(f"key {key!r}: not a number: {mapping[key]!r}") from None


def _as_int(mapping: dict[str, str], key: str) -> int:
    try:
        return int(mapping[key])
    except ValueError:
        raise ConfigError(f"key {key!r}: not an integer: {mapping[key]!r}") from None


def _as_bool(mapping: dict[str, str], key: str) -> bool:
    val = mapping[key].lower()
    if val in ("true", "1", "yes"):
        return True
    if val in ("false", "0", "no"):
        return False
    raise ConfigError(f"key {key!r}: not a boolean: {mapping[key]!r}")


def resolve_config(mapping: dict[str, str]) -> RunConfig:
    """Validate a raw key->string mapping into a RunConfig."""
    for key in mapping:
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config key {key!r}")

    cfg = RunConfig()
    kwargs: dict = {}

    if "problem" in mapping:
        if mapping["problem"] not in ("svm", "logistic"):
            raise ConfigError(f"key 'problem': must be svm or logistic, got {mapping['problem']!r}")
        kwargs["problem"] = mapping["problem"]
    if "dataset" in mapping:
        if not mapping["dataset"]:
            raise ConfigError("key 'dataset': empty value")
        kwargs["dataset"] = mapping["dataset"]
    if "algorithm" in mapping:
        if mapping["algorithm"] not in ("adaprox", "accadaprox", "pg"):
            raise ConfigError(
                f"key 'algorithm': must be adaprox, accadaprox or pg, got {mapping['algorithm']!r}")
        kwargs["algorithm"] = mapping["algorithm"]
    if "lambda" in mapping:
        lam = _as_float(mapping, "lambda")
        if lam < 0:
            raise ConfigError("key 'lambda': must be nonnegative")
        kwargs["lam"] = lam
    if "mu" in mapping:
        mu = _as_float(mapping, "mu")
        if mu < 0:
            raise ConfigError("key 'mu': must be nonnegative")
        kwargs["mu"] = mu
    if "R" in mapping:
        if mapping["R"].lower() == "none":
            kwargs["radius"] = None
        else:
            radius = _as_float(mapping, "R")
            if not radius > 0 or not math.isfinite(radius):
                raise ConfigError("key 'R': must be a positive finite number or 'none'")
            kwargs["radius"] = radius
    for key, field in (("gamma", "gamma"), ("eta", "eta")):
        if key in mapping:
            val = _as_float(mapping, key)
            if not val > 0:
                raise ConfigError(f"key {key!r}: must be positive")
            kwargs[field] = val
    if "pg_step" in mapping:
        _validate_pg_step(mapping["pg_step"])
        kwargs["pg_step"] = mapping["pg_step"]
    if "batch" in mapping:
        from .oracle import BatchSchedule

        try:
            BatchSchedule.parse(mapping["batch"])
        except ValueError as exc:
            raise ConfigError(f"key 'batch': {exc}") from None
        kwargs["batch"] = mapping["batch"]
    if "budget_iters" in mapping and "budget_epochs" in mapping:
        raise ConfigError("keys 'budget_iters' and 'budget_epochs' are mutually exclusive")
    if "budget_iters" in mapping:
        iters = _as_int(mapping, "budget_iters")
        if iters < 0:
            raise ConfigError("key 'budget_iters': must be >= 0")
        kwargs["budget_iters"] = iters
        kwargs["budget_epochs"] = None
    if "budget_epochs" in mapping:
        epochs = _as_float(mapping, "budget_epochs")
        if not epochs > 0:
            raise ConfigError("key 'budget_epochs': must be positive")
        kwargs["budget_epochs"] = epochs
        kwargs["budget_iters"] = None
    if "seed" in mapping:
        seed = _as_int(mapping, "seed")
        if seed < 0:
            raise ConfigError("key 'seed': must be nonnegative")
        kwargs["seed"] = seed
    if "metric_cadence" in mapping:
        cad = _as_int(mapping, "metric_cadence")
        if cad < 1:
            raise ConfigError("key 'metric_cadence': must be >= 1")
        kwargs["metric_cadence"] = cad
    if "train_frac" in mapping:
        frac = _as_float(mapping, "train_frac")
        if not 0 < frac <= 1:
            raise ConfigError("key 'train_frac': must lie in (0, 1]")
        kwargs["train_frac"] = frac
    if "output" in mapping:
        kwargs["output"] = mapping["output"]
    if "label_rule" in mapping:
        if mapping["label_rule"] not in ("sign", "mnist"):
            raise ConfigError("key 'label_rule': must be sign or mnist")
        kwargs["label_rule"] = mapping["label_rule"]
    if "normalize" in mapping:
        kwargs["normalize"] = _as_bool(mapping, "normalize")
    if "subsample" in mapping:
        sub = _as_int(mapping, "subsample")
        if sub < 0:
            raise ConfigError("key 'subsample': must be >= 0")
        kwargs["subsample"] = sub
    if "dim" in mapping:
        dim = _as_int(mapping, "dim")
        if dim < 0:
            raise ConfigError("key 'dim': must be >= 0")
        kwargs["dim"] = dim
    if "init" in mapping:
        _validate_init(mapping["init"])
        kwargs["init"] = mapping["init"]
    if "reference" in mapping:
        if mapping["reference"] not in ("none", "auto"):
            raise ConfigError("key 'reference': must be none or auto")
        kwargs["reference"] = mapping["reference"]
    if "ref_budget" in mapping:
        budget = _as_int(mapping, "ref_budget")
        if budget < 1000:
            raise ConfigError("key 'ref_budget': must be >= 1000")
        kwargs["ref_budget"] = budget
    if "record_wall" in mapping:
        kwargs["record_wall"] = _as_bool(mapping, "record_wall")

    cfg = cfg.with_overrides(**kwargs)

    if cfg.algorithm == "pg" and not cfg.pg_step:
        raise ConfigError("key 'pg_step': required when algorithm is pg")
    if cfg.reference == "auto" and cfg.problem != "logistic":
        raise ConfigError("key 'reference': auto requires the convex (logistic) problem")
    if cfg.budget_iters is None and cfg.budget_epochs is None:
        raise ConfigError("key 'budget_iters': one budget kind is required")
    return cfg


def _validate_pg_step(spec: str) -> None:
    if spec.startswith("invsqrt:"):
        try:
            a0 = float(spec[8:])
        except ValueError:
            raise ConfigError(f"key 'pg_step': bad invsqrt spec {spec!r}") from None
        if not a0 > 0:
            raise ConfigError("key 'pg_step': invsqrt base must be positive")
        return
    body = spec[:-2] if spec.endswith("/L") else spec
    try:
        val = float(body)
    except ValueError:
        raise ConfigError(f"key 'pg_step': unparseable step spec {spec!r}") from None
    if not val > 0:
        raise ConfigError("key 'pg_step': step must be positive")


def _validate_init(spec: str) -> None:
    if spec == "zero":
        return
    if spec.startswith("randn:"):
        try:
            scale = float(spec[6:])
        except ValueError:
            raise ConfigError(f"key 'init': bad randn spec {spec!r}") from None
        if not scale > 0:
            raise ConfigError("key 'init': randn scale must be positive")
        return
    raise ConfigError(f"key 'init': must be zero or randn:<scale>, got {spec!r}")


def config_to_text(cfg: RunConfig) -> str:
    """Canonical serialization; parse(config_to_text(cfg)) == cfg."""
    lines = [
        f"problem = {cfg.problem}",
        f"dataset = {cfg.dataset}",
        f"algorithm = {cfg.algorithm}",
        f"lambda = {cfg.lam!r}",
        f"mu = {cfg.mu!r}",
        f"R = {'none' if cfg.radius is None else repr(cfg.radius)}",
        f"gamma = {cfg.gamma!r}",
        f"eta = {cfg.eta!r}",
        f"batch = {cfg.batch}",
        f"seed = {cfg.seed}",
        f"metric_cadence = {cfg.metric_cadence}",
        f"train_frac = {cfg.train_frac!r}",
        f"label_rule = {cfg.label_rule}",
        f"normalize = {'true' if cfg.normalize else 'false'}",
        f"subsample = {cfg.subsample}",
        f"dim = {cfg.dim}",
        f"init = {cfg.init}",
        f"reference = {cfg.reference}",
        f"ref_budget = {cfg.ref_budget}",
        f"record_wall = {'true' if cfg.record_wall else 'false'}",
    ]
    if cfg.pg_step:
        lines.append(f"pg_step = {cfg.pg_step}")
    if cfg.budget_iters is not None:
        lines.append(f"budget_iters = {cfg.budget_iters}")
    else:
        lines.append(f"budget_epochs = {cfg.budget_epochs!r}")
    if cfg.output:
        lines.append(f"output = {cfg.output}")
    return "\n".join(lines) + "\n"
