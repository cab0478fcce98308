"""Command-line entry point: ``igsp <subcommand> ...``.

Subcommands: ``simulate``, ``run``, ``evaluate``, ``sweep`` and
``oracle-check``. Every random choice flows from ``--seed`` (default 0), and
all JSON is written with sorted keys, so identical flags give identical
bytes.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .algorithms import ScoreConfig, SearchConfig, algorithm1, igsp
from .citest import DataOracle, DSepOracle
from .errors import (
    DatasetError,
    InsufficientSamplesError,
    InvalidArgumentError,
    NumericalDegeneracyError,
)
from .evaluation import (
    ScenarioConfig,
    consistency_sweep,
    imec_recovered,
    make_instance,
    random_guess_counts,
    roc_point,
    simulate_dataset,
    structural_metrics,
)
from .graph import markov_equivalent
from .imap import random_permutation
from .io import load_dataset, read_edges, write_edges, write_manifest, write_samples
from .rng import DEFAULT_SEED, derive_rng


class CliError(Exception):
    """A usage problem reported as a one-line diagnostic."""


def _dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _max_depth(value: str) -> int | None:
    if value.lower() in ("none", "0", "inf"):
        return None
    try:
        depth = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer or 'none', got {value!r}")
    if depth < 0:
        raise argparse.ArgumentTypeError(f"max depth must be nonnegative, got {depth}")
    return depth


def _float_list(value: str) -> list[float]:
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {value!r}")


def _int_list(value: str) -> list[int]:
    try:
        return [int(float(v)) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}")


def _nonneg_int(value: str) -> int:
    n = int(value)
    if n < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {value}")
    return n


# ---------------------------------------------------------------- simulate


def cmd_simulate(args) -> int:
    scenario = ScenarioConfig(
        p=args.p,
        density=args.density,
        k=args.k,
        target_size=args.target_size,
        c=args.c,
        ns=(args.n,),
    )
    inst = make_instance(scenario, args.seed, 0)
    data = simulate_dataset(inst.model, inst.family, args.n, args.seed, 0, 1, 0)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    variables = [f"X{i + 1}" for i in range(args.p)]
    files = [f"regime_{k}.csv" for k in range(len(inst.family))]
    for f, d in zip(files, data):
        write_samples(out / f, d.samples)
    options = {
        "generator": {
            "p": args.p,
            "density": args.density,
            "k": args.k,
            "target_size": args.target_size,
            "c": args.c,
            "n": args.n,
            "seed": args.seed,
        },
        "truth": "truth.edges",
        "weights": [
            [variables[i], variables[j], w] for (i, j), w in sorted(inst.model.weights.items())
        ],
    }
    write_manifest(out / "manifest.json", variables, inst.family, files, options)
    write_edges(out / "truth.edges", inst.model.dag, variables)
    return 0


# --------------------------------------------------------------------- run


def _run_config(args) -> dict[str, Any]:
    return {
        "algorithm": args.algorithm,
        "manifest": args.manifest,
        "alpha": args.alpha,
        "delta": args.delta,
        "max_depth": args.max_depth,
        "restarts": args.restarts,
        "seed": args.seed,
        "start": args.start,
    }


def execute_run(config: dict[str, Any]) -> tuple[Any, list[str], dict[str, Any]]:
    """Run one search as described by a report's ``config`` block."""
    loaded = load_dataset(config["manifest"])
    p = len(loaded.names)
    if config.get("start") is not None:
        names = loaded.names
        try:
            pi0 = tuple(names[v] for v in config["start"])
        except KeyError as exc:
            raise CliError(f"--start names unknown variable {exc.args[0]!r}") from None
    else:
        pi0 = random_permutation(p, derive_rng(config["seed"], 0))
    search = SearchConfig(
        max_depth=config["max_depth"], max_restarts=config["restarts"], rng_seed=config["seed"]
    )
    if config["algorithm"] == "igsp":
        oracle = DataOracle(loaded.data, config["alpha"])
        result = igsp(oracle, loaded.family, pi0, search)
        extra = {"ci_tests": oracle.n_tests, "n_edges": result.score[0],
                 "n_contradicting": result.score[1]}
    else:
        cfg = ScoreConfig.default(loaded.data, delta=config["delta"])
        result = algorithm1(loaded.data, loaded.family, pi0, cfg, search)
        extra = {"score": result.score, "lambdas": list(cfg.lambdas), "delta": cfg.delta}
    variables = loaded.variables
    summary = {
        "start": [variables[v] for v in pi0],
        "permutation": [variables[v] for v in result.perm],
        "edges": [[variables[i], variables[j]] for i, j in sorted(result.dag.arrows)],
        "depth_limited": result.depth_limited,
        "trace": [
            {
                "kind": s.kind,
                "run": s.run,
                "n_edges": s.n_edges,
                "moves": [[variables[i], variables[j]] for i, j in s.moves],
                "n_contradicting": s.n_contradicting,
                "score": s.score,
            }
            for s in result.trace
        ],
        **extra,
    }
    return result, variables, summary


def cmd_run(args) -> int:
    if args.from_report:
        report = json.loads(Path(args.from_report).read_text())
        config = report["config"]
        out = args.out or report["outputs"]["edges"]
        report_path = args.report or report["outputs"]["report"]
    else:
        if not args.manifest or not args.out:
            raise CliError("run needs --manifest and --out (or --from-report)")
        config = _run_config(args)
        out = args.out
        report_path = args.report or f"{out}.report.json"
    result, variables, summary = execute_run(config)
    write_edges(out, result.dag, variables)
    report = {
        "version": __version__,
        "config": config,
        "outputs": {"edges": out, "report": report_path},
        "result": summary,
    }
    Path(report_path).write_text(_dump_json(report))
    return 0


# ---------------------------------------------------------------- evaluate


def cmd_evaluate(args) -> int:
    loaded = load_dataset(args.manifest)
    estimate = read_edges(args.estimate, loaded.names)
    truth = read_edges(args.truth, loaded.names)
    counts = structural_metrics(estimate, truth)
    p = len(loaded.names)
    fpr, tpr = roc_point(counts, p, directed=True)
    sfpr, stpr = roc_point(counts, p, directed=False)
    metrics = {
        **counts.as_dict(),
        "estimate_edge_count": len(estimate),
        "imec_recovered": imec_recovered(estimate, truth, loaded.family),
        "mec_recovered": markov_equivalent(estimate, truth),
        "directed_roc": {"fpr": fpr, "tpr": tpr},
        "skeleton_roc": {"fpr": sfpr, "tpr": stpr},
        "random_guess": random_guess_counts(p, len(truth), len(estimate)),
    }
    _write_text(args.out, _dump_json(metrics))
    return 0


# ------------------------------------------------------------------- sweep


def cmd_sweep(args) -> int:
    scenario = ScenarioConfig(
        p=args.p,
        density=args.density,
        k=args.k,
        target_size=args.target_size,
        c=args.c,
        ns=tuple(args.ns),
        oracle=args.oracle,
    )
    rows = consistency_sweep(
        scenario,
        args.algorithm,
        args.alphas,
        args.trials,
        args.seed,
        SearchConfig(max_depth=args.max_depth),
        workers=args.workers,
    )
    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["alpha", "n", "proportion", "successes", "trials", "errors"])
        for r in rows:
            writer.writerow([repr(r.alpha), r.n, repr(r.proportion), r.successes, r.trials, r.errors])
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


# ------------------------------------------------------------ oracle-check


def cmd_oracle_check(args) -> int:
    loaded = load_dataset(args.manifest)
    truth = read_edges(args.truth, loaded.names)
    oracle = DSepOracle(truth, loaded.family)
    p = truth.p
    variables = loaded.variables
    runs = []
    for s in range(args.starts):
        pi0 = random_permutation(p, derive_rng(args.seed, s))
        result = igsp(oracle, loaded.family, pi0, SearchConfig(max_depth=args.max_depth))
        runs.append(
            {
                "start": [variables[v] for v in pi0],
                "edges": [[variables[i], variables[j]] for i, j in sorted(result.dag.arrows)],
                "imec_recovered": imec_recovered(result.dag, truth, loaded.family),
            }
        )
    ok = all(r["imec_recovered"] for r in runs)
    _write_text(args.out, _dump_json({"passed": ok, "runs": runs}))
    if not ok:
        print("oracle-check: estimate not I-Markov equivalent to the truth", file=sys.stderr)
    return 0 if ok else 1


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="igsp", description="Causal structure learning from interventional data."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_flags(sp, n_flag: bool):
        sp.add_argument("--p", type=int, required=True, help="number of variables")
        sp.add_argument("--density", type=float, default=1.5, help="expected neighbourhood size")
        sp.add_argument("--k", type=int, default=1, help="number of interventional regimes")
        sp.add_argument("--target-size", type=int, default=1, help="nodes per intervention")
        sp.add_argument("--c", type=float, default=0.0, help="lower bound on |weight|")
        if n_flag:
            sp.add_argument("--n", type=int, default=1000, help="samples per regime")
        sp.add_argument("--seed", type=_nonneg_int, default=DEFAULT_SEED)

    sp = sub.add_parser("simulate", help="draw a random model and write its data")
    scenario_flags(sp, n_flag=True)
    sp.add_argument("--out", required=True, help="output directory")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("run", help="estimate a DAG from a manifest")
    sp.add_argument("--algorithm", choices=("igsp", "alg1"), default="igsp")
    sp.add_argument("--manifest")
    sp.add_argument("--alpha", type=float, default=0.01, help="CI test level (igsp)")
    sp.add_argument("--delta", type=float, default=None, help="score slack (alg1)")
    sp.add_argument("--max-depth", type=_max_depth, default=4, help="'none' for unbounded")
    sp.add_argument("--restarts", type=_nonneg_int, default=0)
    sp.add_argument("--seed", type=_nonneg_int, default=DEFAULT_SEED)
    sp.add_argument("--start", type=lambda v: v.split(","), default=None,
                    help="comma-separated starting order of variable names")
    sp.add_argument("--out", help="estimated edge list")
    sp.add_argument("--report", help="run report (default: OUT.report.json)")
    sp.add_argument("--from-report", help="rerun the configuration stored in a report")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("evaluate", help="compare an estimate with the truth")
    sp.add_argument("--estimate", required=True)
    sp.add_argument("--truth", required=True)
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--out", default=None, help="metrics JSON (default stdout)")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("sweep", help="I-MEC recovery proportions over alpha and n")
    scenario_flags(sp, n_flag=False)
    sp.add_argument("--ns", type=_int_list, default=[1000], help="comma-separated sample sizes")
    sp.add_argument("--alphas", type=_float_list, default=[0.01], help="comma-separated levels")
    sp.add_argument("--trials", type=int, default=10)
    sp.add_argument("--algorithm", choices=("igsp", "alg1"), default="igsp")
    sp.add_argument("--oracle", choices=("data", "dsep"), default="data")
    sp.add_argument("--max-depth", type=_max_depth, default=4)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", default=None, help="CSV table (default stdout)")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("oracle-check", help="IGSP with exact d-separation answers")
    sp.add_argument("--truth", required=True)
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--starts", type=int, default=5, help="random starting permutations")
    sp.add_argument("--max-depth", type=_max_depth, default=4)
    sp.add_argument("--seed", type=_nonneg_int, default=DEFAULT_SEED)
    sp.add_argument("--out", default=None, help="summary JSON (default stdout)")
    sp.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, DatasetError, InvalidArgumentError) as exc:
        print(f"igsp {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (InsufficientSamplesError, NumericalDegeneracyError) as exc:
        print(f"igsp {args.command}: data error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
