"""Command-line interface for running experiments.

Subcommands: run (single configured run), sweep (same config over a seed
list), mae (surrogate error ablation), bench (one-off function evaluation),
list (benchmark registry). Config files are flat `key = value` text; every
key can be overridden by a command-line flag.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bench, runner
from .afo import AfoConfig

_CONFIG_KEYS = {
    "benchmark": str, "method": str, "budget": int, "n_init": int,
    "seed": int, "max_order": str, "cma_population": int,
    "cma_sigma0": float, "cma_budget": int, "ls_restarts": int,
    "alternations": int, "n_hyper_samples": int, "burn_in": int,
    "output": str,
}


def parse_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = _CONFIG_KEYS[key](value)
    return out


def _build_run_config(values: dict) -> runner.RunConfig:
    max_order = values.get("max_order", "full")
    if max_order != "full":
        max_order = int(max_order)
    afo_cfg = AfoConfig(
        cma_population=values.get("cma_population", 50),
        cma_sigma0=values.get("cma_sigma0", 0.1),
        cma_budget=values.get("cma_budget", 2000),
        ls_restarts=values.get("ls_restarts", 20),
        alternations=values.get("alternations", 1),
    )
    return runner.RunConfig(
        benchmark=values["benchmark"],
        method=values.get("method", "hybo"),
        budget=values["budget"],
        n_init=values.get("n_init", 5),
        seed=values["seed"],
        max_order=max_order,
        afo=afo_cfg,
        n_hyper_samples=values.get("n_hyper_samples", 10),
        burn_in=values.get("burn_in", 50),
        output_path=values.get("output"),
    )


def _add_run_flags(p: argparse.ArgumentParser, seed_required: bool):
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--benchmark")
    p.add_argument("--method", choices=runner.METHODS)
    p.add_argument("--budget", type=int)
    p.add_argument("--n-init", dest="n_init", type=int)
    if seed_required:
        p.add_argument("--seed", type=int, required=False)
    p.add_argument("--max-order", dest="max_order")
    p.add_argument("--cma-population", dest="cma_population", type=int)
    p.add_argument("--cma-sigma0", dest="cma_sigma0", type=float)
    p.add_argument("--cma-budget", dest="cma_budget", type=int)
    p.add_argument("--ls-restarts", dest="ls_restarts", type=int)
    p.add_argument("--alternations", type=int)
    p.add_argument("--n-hyper-samples", dest="n_hyper_samples", type=int)
    p.add_argument("--burn-in", dest="burn_in", type=int)
    p.add_argument("--output")


def _collect_values(args) -> dict:
    values = {}
    if getattr(args, "config", None):
        values.update(parse_config_file(args.config))
    for key in _CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    if getattr(args, "seed", None) is not None:
        values["seed"] = args.seed
    return values


def _cmd_run(args) -> int:
    values = _collect_values(args)
    if "seed" not in values:
        print("error: --seed is required for run", file=sys.stderr)
        return 2
    if "benchmark" not in values or "budget" not in values:
        print("error: benchmark and budget must be set", file=sys.stderr)
        return 2
    cfg = _build_run_config(values)
    log = runner.run(cfg)
    rec = log.best_record
    print(f"{cfg.benchmark} {cfg.method} seed={cfg.seed}: "
          f"best={log.best:.6g} at iter {rec.index} "
          f"({log.total_s:.1f}s, {len(log.records)} evaluations)")
    return 0


def _cmd_sweep(args) -> int:
    values = _collect_values(args)
    if "benchmark" not in values or "budget" not in values:
        print("error: benchmark and budget must be set", file=sys.stderr)
        return 2
    seeds = [int(s) for s in args.seeds.split(",")]
    output = values.pop("output", None)
    finals = []
    for seed in seeds:
        values["seed"] = seed
        if output:
            values["output"] = f"{output}.seed{seed}.csv"
        cfg = _build_run_config(values)
        log = runner.run(cfg)
        finals.append(log.best)
        print(f"seed {seed}: best = {log.best!r}")
    print(f"median over {len(seeds)} seeds: {float(np.median(finals))!r}")
    return 0


def _cmd_mae(args) -> int:
    train_sizes = [int(s) for s in args.train_sizes.split(",")]
    seeds = [int(s) for s in args.seeds.split(",")]
    rows, aggregates = runner.surrogate_mae_experiment(
        args.benchmark, train_sizes, seeds, test_size=args.test_size)
    lines = ["seed,train_size,mae"]
    lines += [f"{r['seed']},{r['train_size']},{r['mae']!r}" for r in rows]
    body = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    for size in train_sizes:
        mean, two_se = aggregates[size]
        print(f"train_size {size}: MAE {mean:.6g} +/- {two_se:.6g} (2 SE)")
    return 0


def _cmd_bench(args) -> int:
    if args.action != "eval":
        print(f"error: unknown bench action {args.action!r}", file=sys.stderr)
        return 2
    try:
        fn = bench.lookup(args.name)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    vals = [float(v) for v in args.values]
    if len(vals) != fn.spec.dim:
        print(f"error: {fn.name} expects {fn.spec.m} discrete + "
              f"{fn.spec.n} continuous raw values", file=sys.stderr)
        return 2
    y = fn.evaluate_raw(np.array(vals[:fn.spec.m]), np.array(vals[fn.spec.m:]))
    print(repr(y))
    return 0


def _cmd_list(_args) -> int:
    for name in bench.names():
        fn = bench.lookup(name)
        print(f"{name}: {fn.spec.m} discrete + {fn.spec.n} continuous")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridopt",
        description="Bayesian optimization over hybrid discrete/continuous spaces")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one configured experiment")
    _add_run_flags(p_run, seed_required=True)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run the same config over a seed list")
    _add_run_flags(p_sweep, seed_required=False)
    p_sweep.add_argument("--seeds", required=True,
                         help="comma-separated seed list")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_mae = sub.add_parser("mae", help="surrogate MAE ablation")
    p_mae.add_argument("--benchmark", required=True)
    p_mae.add_argument("--train-sizes", dest="train_sizes", required=True)
    p_mae.add_argument("--seeds", required=True)
    p_mae.add_argument("--test-size", dest="test_size", type=int, default=200)
    p_mae.add_argument("--output")
    p_mae.set_defaults(func=_cmd_mae)

    p_bench = sub.add_parser("bench", help="benchmark utilities")
    p_bench.add_argument("action", choices=["eval"])
    p_bench.add_argument("--name", required=True)
    p_bench.add_argument("--values", nargs="+", required=True,
                         help="raw values, discrete levels first")
    p_bench.set_defaults(func=_cmd_bench)

    p_list = sub.add_parser("list", help="list registered benchmarks")
    p_list.set_defaults(func=_cmd_list)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
