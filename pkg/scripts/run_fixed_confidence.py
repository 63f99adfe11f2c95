#!/usr/bin/env python3
"""Fixed-confidence run on the karate graph, with the uniform-arm baseline
at the matched budget for comparison.

Both algorithms share one randomly generated spanning arm family, so the
comparison isolates the sampling strategy. Per-round traces (incumbent
density, confidence radius, mean absolute estimation error) are written as
CSVs under --out; the closing lines print mean quality for both methods
against the exact optimum.

    python3 scripts/run_fixed_confidence.py --quick      # 2 seeds, low cap
    python3 scripts/run_fixed_confidence.py --seeds 0:10 # full comparison
"""

import argparse
import os
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, os.path.join(HERE, os.pardir, "src"))

from densebandits.cli import main as cli  # noqa: E402
from densebandits.graph import load_edge_list  # noqa: E402

def run(argv: list[str]) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=os.path.join(HERE, os.pardir, "results", "fixed_confidence"))
    ap.add_argument("--graph", default=os.path.join(HERE, os.pardir, "data", "karate.txt"))
    ap.add_argument("--seeds", default="0:10")
    ap.add_argument("--weight-seed", type=int, default=0)
    ap.add_argument("--k", type=int, default=10, help="minimum arm size")
    ap.add_argument("--cap", type=int, default=10_000,
                    help="round cap beyond the m initialization pulls")
    ap.add_argument("--lam", type=float, default=100.0)
    ap.add_argument("--quick", action="store_true", help="2 seeds, cap 500")
    args = ap.parse_args(argv)
    seeds = "0:2" if args.quick else args.seeds
    cap = 500 if args.quick else args.cap

    os.makedirs(args.out, exist_ok=True)
    weights = os.path.join(args.out, "weights.txt")
    if cli(["gen-weights", "--graph", args.graph, "--seed", str(args.weight_seed),
            "--out", weights]) != 0:
        return 1

    m = load_edge_list(args.graph).m
    budget = m + cap
    common = ["--graph", args.graph, "--weights", weights, "--seeds", seeds,
              "--k", str(args.k), "--family-seed", "0"]
    results = []
    for algo, extra in (
        ("dslin", ["--max-iters", str(budget), "--lambda", str(args.lam)]),
        ("naive", ["--budget", str(budget)]),
    ):
        out_dir = os.path.join(args.out, algo)
        code = cli([algo, *common, "--out", out_dir] + extra)
        if code != 0:
            return code
        results.append(os.path.join(out_dir, "results.csv"))
    return cli(["report", *results, "--out", os.path.join(args.out, "summary.csv")])


if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
