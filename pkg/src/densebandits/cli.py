"""Command-line front end for the benchmark harness.

Subcommands: gen-weights, exact, brute, g-oracle, dslin, dssr, naive,
r-oracle, report. Exit codes: 0 on success, 1 for configuration problems
(bad flags, missing files), 2 for runtime failures.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .experiments import (
    ConfigError,
    ExperimentConfig,
    config_from_file,
    generate_weight_file,
    parse_seeds,
    read_results,
    run_experiment,
    write_results,
)
from .graph import load_edge_list, load_weights
from .solvers import brute_force_densest, exact_densest, greedy_peeling


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - flag problems are config errors
        self.print_usage(sys.stderr)
        print(f"config error: {message}", file=sys.stderr)
        sys.exit(1)


_ALGO_COMMANDS = ("exact", "brute", "g-oracle", "dslin", "dssr", "naive", "r-oracle")


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--graph", help="edge-list file")
    sub.add_argument("--weights", help="weight file covering every edge")
    sub.add_argument("--seed", type=int, help="single seed")
    sub.add_argument("--seeds", help="seed list: '7', '1,2,5' or range '0:100'")
    sub.add_argument("--out", help="output directory for CSVs")
    sub.add_argument("--config", help="key=value config file (flags override it)")
    sub.add_argument("--noise", choices=("gaussian-per-edge", "none"), help="oracle noise kind")
    sub.add_argument("--R", type=float, dest="R", help="noise scale")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bench-cli", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gw = subs.add_parser("gen-weights", help="write a knockout weight file")
    gw.add_argument("--graph", required=True)
    gw.add_argument("--seed", type=int, default=0)
    gw.add_argument("--out", required=True, help="weight file to write")

    for name in _ALGO_COMMANDS:
        sub = subs.add_parser(name, help=f"run {name}")
        _add_common(sub)
        if name in ("dssr", "naive"):
            sub.add_argument("--budget", type=int, help="total query budget T")
        if name == "dslin":
            sub.add_argument("--max-iters", type=int, dest="max_iters", help="total round cap (includes the m init rounds)")
            sub.add_argument("--epsilon", type=float, help="PAC slack")
            sub.add_argument("--delta", type=float, help="PAC failure rate")
            sub.add_argument("--lambda", type=float, dest="lam", help="ridge parameter")
            sub.add_argument("--L", type=float, dest="L", help="weight-norm bound")
            sub.add_argument("--stop-mode", choices=("conservative", "exact-second-best"), dest="stop_mode")
        if name in ("dslin", "naive"):
            sub.add_argument("--k", type=int, help="minimum arm size (> 2)")
            sub.add_argument("--family-seed", type=int, dest="family_seed", help="arm-family seed")
        if name == "r-oracle":
            sub.add_argument("--gamma", type=float, help="interval failure rate")
            sub.add_argument("--epsilon", type=float, help="interval accuracy")

    rep = subs.add_parser("report", help="aggregate results CSVs")
    rep.add_argument("paths", nargs="+", help="results.csv files")
    rep.add_argument("--out", help="write the aggregate table as CSV")
    return parser


def _build_config(args: argparse.Namespace, algorithm: str) -> ExperimentConfig:
    values: dict[str, object] = {}
    if getattr(args, "config", None):
        base = config_from_file(args.config)
        values = {
            f: getattr(base, f)
            for f in (
                "algorithm graph weights seeds out budget max_iters k epsilon "
                "delta lam R L stop_mode gamma noise family_seed".split()
            )
        }
    values["algorithm"] = algorithm
    for field in (
        "graph weights out budget max_iters k epsilon delta lam R L "
        "stop_mode gamma noise family_seed".split()
    ):
        v = getattr(args, field, None)
        if v is not None:
            values[field] = v
    if getattr(args, "seeds", None) is not None:
        values["seeds"] = parse_seeds(args.seeds)
    elif getattr(args, "seed", None) is not None:
        values["seeds"] = (args.seed,)
    if "graph" not in values or values.get("graph") is None:
        raise ConfigError("--graph is required")
    return ExperimentConfig(**values)  # type: ignore[arg-type]


def _print_solution(algorithm: str, graph_path: str, weights_path: str) -> None:
    G = load_edge_list(graph_path)
    w = load_weights(weights_path, G)
    if algorithm == "exact":
        res = exact_densest(G, w)
        subset, value = res.subset, res.value
    elif algorithm == "brute":
        res = brute_force_densest(G, w)
        subset, value = res.subset, res.value
    else:
        subset, value = greedy_peeling(G, w)
    labels = " ".join(G.labels[v] for v in subset)
    print(f"subset ({len(subset)} vertices): {labels}")
    print(f"density: {value!r}")


def _run_algorithm(args: argparse.Namespace, algorithm: str) -> int:
    config = _build_config(args, algorithm)
    records = run_experiment(config)
    if not records:
        print("runtime failure: every seed failed (see errors.log)", file=sys.stderr)
        return 2
    if algorithm in ("exact", "brute", "g-oracle"):
        _print_solution(algorithm, config.graph, config.weights)
    qualities = np.array([r.quality for r in records])
    print(
        f"algo={algorithm} graph={records[0].graph} seeds={len(records)} "
        f"mean_quality={qualities.mean():.4f} std={qualities.std():.4f} "
        f"opt={records[0].opt:.4f} "
        f"mean_queries={np.mean([r.total_queries for r in records]):.1f} "
        f"mean_single_edge={np.mean([r.single_edge_queries for r in records]):.1f}"
    )
    if config.out:
        print(f"results written to {Path(config.out) / 'results.csv'}")
    return 0


def _report(args: argparse.Namespace) -> int:
    groups: dict[tuple[str, str], list] = {}
    for path in args.paths:
        records, _ = read_results(path)
        for r in records:
            groups.setdefault((r.algo, r.graph), []).append(r)
    header = (
        "algo,graph,runs,mean_quality,std_quality,opt,mean_queries,"
        "mean_single_edge,single_edge_fraction,mean_elapsed_ms"
    )
    lines = [header]
    for (algo, graph), rs in sorted(groups.items()):
        q = np.array([r.quality for r in rs])
        tq = np.array([r.total_queries for r in rs], dtype=np.float64)
        sq = np.array([r.single_edge_queries for r in rs], dtype=np.float64)
        frac = float(sq.sum() / tq.sum()) if tq.sum() > 0 else 0.0
        lines.append(
            f"{algo},{graph},{len(rs)},{float(q.mean())!r},{float(q.std())!r},"
            f"{float(rs[0].opt)!r},{float(tq.mean())!r},{float(sq.mean())!r},"
            f"{frac!r},{float(np.mean([r.elapsed_ms for r in rs]))!r}"
        )
    print("\n".join(lines))
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text("\n".join(lines) + "\n")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen-weights":
            generate_weight_file(args.graph, args.seed, args.out)
            print(f"wrote knockout weights (seed {args.seed}) to {args.out}")
            return 0
        if args.command == "report":
            return _report(args)
        return _run_algorithm(args, args.command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
