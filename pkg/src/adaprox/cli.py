"""Command-line front end: solve | bench | verify | data.

Exit codes: 0 success, 1 runtime error, 2 configuration error (the message
names the offending key), 3 data error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench as bench_mod
from . import problems
from .config import ConfigError, parse_config_text, parse_overrides, resolve_config
from .runner import run_to_files
from .verify import run_suites

__all__ = ["main", "entrypoint"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adaprox",
        description="Adaptive proximal gradient solvers and benchmark harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run one configured experiment")
    solve.add_argument("--config", required=True, help="key=value config file")
    solve.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override a config key")

    bench = sub.add_parser("bench", help="run a predefined experiment suite")
    bench.add_argument("suite", choices=bench_mod.SUITES)
    bench.add_argument("scale", choices=("desk", "full"))
    bench.add_argument("--out", default=None, help="output directory")
    bench.add_argument("--jobs", type=int, default=1, help="parallel runs")
    bench.add_argument("--data-dir", default=None,
                       help="directory holding full-scale dataset files")

    verify = sub.add_parser("verify", help="run the self-check suites")
    verify.add_argument("level", choices=("fast", "full"), nargs="?",
                        default="fast")

    data = sub.add_parser("data", help="inspect a LIBSVM dataset file")
    data.add_argument("path")
    data.add_argument("--json", action="store_true", help="emit JSON")
    data.add_argument("--label-rule", choices=("sign", "mnist"), default="sign")
    data.add_argument("--dim", type=int, default=0,
                      help="pad the feature dimension")
    return parser


def _cmd_solve(args) -> int:
    cfg_path = Path(args.config)
    if not cfg_path.is_file():
        raise problems.DataError(f"config file not found: {cfg_path}")
    mapping = parse_config_text(cfg_path.read_text(encoding="utf-8"))
    mapping.update(parse_overrides(args.overrides))
    cfg = resolve_config(mapping)
    if not cfg.output:
        raise ConfigError("key 'output': required for solve")
    result = run_to_files(cfg)
    final = result.final()
    print(f"wrote {cfg.output} ({len(result.records)} rows, "
          f"k={final.k}, F={final.F})")
    return 0


def _cmd_bench(args) -> int:
    out = args.out or f"bench_{args.suite}_{args.scale}"
    summary = bench_mod.run_suite(args.suite, args.scale, out,
                                  jobs=max(1, args.jobs), base=args.data_dir)
    print(f"wrote {len(summary['runs'])} runs to {out} (summary.json)")
    return 0


def _cmd_verify(args) -> int:
    results = run_suites(args.level)
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        line = f"{status} {res.name} checks={res.checks} failures={res.failures}"
        if res.detail:
            line += f" ({res.detail})"
        print(line)
        failed += 0 if res.passed else 1
    print(f"{len(results) - failed}/{len(results)} suites passed")
    return 0 if failed == 0 else 1


def _cmd_data(args) -> int:
    ds = problems.load_libsvm(args.path, label_rule=args.label_rule,
                              dim=args.dim)
    norms = problems.row_norms(ds)
    nonzero = norms[norms > 0]
    pos = int((ds.labels > 0).sum())
    info = {
        "path": args.path,
        "n": ds.n,
        "d": ds.d,
        "positive_labels": pos,
        "negative_labels": ds.n - pos,
        "zero_rows": int((norms == 0).sum()),
        "row_norm_min": float(nonzero.min()) if nonzero.size else 0.0,
        "row_norm_mean": float(nonzero.mean()) if nonzero.size else 0.0,
        "row_norm_max": float(nonzero.max()) if nonzero.size else 0.0,
        "checksum": problems.file_checksum(args.path),
    }
    if args.json:
        print(json.dumps(info, indent=2, sort_keys=True))
    else:
        print(f"{args.path}: n={info['n']} d={info['d']}")
        print(f"labels: +1 x {info['positive_labels']}, "
              f"-1 x {info['negative_labels']}")
        print(f"row norms (nonzero rows): min={info['row_norm_min']:.6g} "
              f"mean={info['row_norm_mean']:.6g} max={info['row_norm_max']:.6g}; "
              f"zero rows: {info['zero_rows']}")
        print(f"sha256: {info['checksum']}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "solve": _cmd_solve,
        "bench": _cmd_bench,
        "verify": _cmd_verify,
        "data": _cmd_data,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except problems.DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())
