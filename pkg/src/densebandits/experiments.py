"""Experiment harness: knockout weights, seeded batch runs, CSV reporting.

A batch is described by an ``ExperimentConfig`` (also readable from a flat
key=value file). Each seed gets its own oracle; the arm family, when one is
needed, is generated once per batch from ``family_seed`` so every seed and
every algorithm compares on identical arms. Results go to a flat CSV with
one row per seed plus mean/std aggregate rows, and per-run query-size
histograms and traces are written as separate CSVs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .baselines import run_naive, run_r_oracle
from .dslin import DsLinParams, generate_arm_family, run_dslin
from .dssr import run_dssr
from .graph import Graph, density, induced_edges, load_edge_list, load_weights, save_weights
from .oracle import NOISE_KINDS, NoiseModel, make_oracle
from .solvers import brute_force_densest, exact_densest, greedy_peeling

ALGORITHMS = ("dslin", "dssr", "naive", "r-oracle", "g-oracle", "exact", "brute")

RESULTS_HEADER = (
    "algo,graph,seed,budget,quality,opt,out_size,total_queries,single_edge_queries,elapsed_ms"
)
HISTOGRAM_HEADER = "query_size,count"


class ConfigError(ValueError):
    """Invalid experiment configuration (bad flag values, missing files)."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One batch: an algorithm, a weighted graph, seeds, and hyperparameters.

    Optional numeric fields left as None are resolved per algorithm at run
    time (budget, iteration cap, epsilon defaults differ between the
    fixed-confidence and interval baselines).
    """

    algorithm: str
    graph: str
    weights: str | None = None
    seeds: tuple[int, ...] = (0,)
    out: str | None = None
    budget: int | None = None
    max_iters: int | None = None
    k: int = 10
    epsilon: float | None = None
    delta: float = 0.1
    lam: float = 1.0
    R: float = 1.0
    L: float | None = None
    stop_mode: str = "conservative"
    gamma: float = 0.9
    noise: str = "gaussian-per-edge"
    family_seed: int = 0

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if not Path(self.graph).is_file():
            raise ConfigError(f"graph file not found: {self.graph}")
        if self.weights is None:
            raise ConfigError("a weight file is required (generate one with gen-weights)")
        if not Path(self.weights).is_file():
            raise ConfigError(f"weight file not found: {self.weights}")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if self.k <= 2:
            raise ConfigError("k must exceed 2")
        if self.budget is not None and self.budget < 1:
            raise ConfigError("budget must be positive")
        if self.max_iters is not None and self.max_iters < 1:
            raise ConfigError("max-iters must be positive")
        if self.epsilon is not None and self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")
        if not (0 < self.delta < 1):
            raise ConfigError("delta must lie in (0, 1)")
        if self.lam <= 0:
            raise ConfigError("lambda must be positive")
        if self.R < 0:
            raise ConfigError("R must be nonnegative")
        if self.noise == "gaussian-per-edge" and self.R == 0:
            raise ConfigError("gaussian noise needs R > 0 (use noise=none for exact sums)")
        if self.stop_mode not in ("conservative", "exact-second-best"):
            raise ConfigError(f"unknown stop-mode {self.stop_mode!r}")
        if not (0 < self.gamma < 1):
            raise ConfigError("gamma must lie in (0, 1)")
        if self.noise not in NOISE_KINDS:
            raise ConfigError(f"unknown noise kind {self.noise!r}; choose from {NOISE_KINDS}")


_FILE_KEYS = {
    "algorithm": "algorithm",
    "graph": "graph",
    "weights": "weights",
    "seeds": "seeds",
    "out": "out",
    "budget": "budget",
    "max-iters": "max_iters",
    "k": "k",
    "epsilon": "epsilon",
    "delta": "delta",
    "lambda": "lam",
    "R": "R",
    "L": "L",
    "stop-mode": "stop_mode",
    "gamma": "gamma",
    "noise": "noise",
    "family-seed": "family_seed",
}
_FIELD_TO_KEY = {v: k for k, v in _FILE_KEYS.items()}
_INT_FIELDS = {"budget", "max_iters", "k", "family_seed"}
_FLOAT_FIELDS = {"epsilon", "delta", "lam", "R", "L", "gamma"}


def parse_seeds(text: str) -> tuple[int, ...]:
    """Seed list syntax: '7', '1,2,5', or half-open range '0:100'."""
    text = text.strip()
    if ":" in text:
        lo, hi = text.split(":", 1)
        lo_i, hi_i = int(lo), int(hi)
        if hi_i <= lo_i:
            raise ConfigError(f"empty seed range {text!r}")
        return tuple(range(lo_i, hi_i))
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def config_from_file(path: str | Path) -> ExperimentConfig:
    """Parse a flat key=value config file."""
    values: dict[str, object] = {}
    with Path(path).open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, val = (part.strip() for part in line.split("=", 1))
            if key not in _FILE_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            fieldname = _FILE_KEYS[key]
            if fieldname == "seeds":
                values[fieldname] = parse_seeds(val)
            elif fieldname in _INT_FIELDS:
                values[fieldname] = int(val)
            elif fieldname in _FLOAT_FIELDS:
                values[fieldname] = float(val)
            else:
                values[fieldname] = val
    if "algorithm" not in values or "graph" not in values:
        raise ConfigError(f"{path}: config must set at least algorithm and graph")
    return ExperimentConfig(**values)  # type: ignore[arg-type]


def config_to_file(config: ExperimentConfig, path: str | Path) -> None:
    lines = []
    for f in fields(config):
        val = getattr(config, f.name)
        if val is None:
            continue
        if f.name == "seeds":
            val = ",".join(str(s) for s in val)
        lines.append(f"{_FIELD_TO_KEY[f.name]}={val}")
    _atomic_write(Path(path), "\n".join(lines) + "\n")


@dataclass(frozen=True)
class RunRecord:
    """One seeded run's outcome, flattened for the results CSV."""

    algo: str
    graph: str
    seed: int
    budget: int
    quality: float
    opt: float
    out_size: int
    total_queries: int
    single_edge_queries: int
    elapsed_ms: float
    histogram_path: str | None = None

    def csv_row(self) -> str:
        return ",".join(
            [
                self.algo,
                self.graph,
                str(self.seed),
                str(self.budget),
                repr(float(self.quality)),
                repr(float(self.opt)),
                str(self.out_size),
                str(self.total_queries),
                str(self.single_edge_queries),
                repr(float(self.elapsed_ms)),
            ]
        )


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    tmp.replace(path)


def write_results(path: str | Path, records: list[RunRecord], aggregate: bool = True) -> None:
    """Emit the results CSV: one row per record plus mean/std rows."""
    lines = [RESULTS_HEADER]
    lines.extend(r.csv_row() for r in records)
    if aggregate and records:
        numeric = np.array(
            [
                [
                    r.budget,
                    r.quality,
                    r.opt,
                    r.out_size,
                    r.total_queries,
                    r.single_edge_queries,
                    r.elapsed_ms,
                ]
                for r in records
            ],
            dtype=np.float64,
        )
        for name, stat in (("mean", numeric.mean(axis=0)), ("std", numeric.std(axis=0))):
            lines.append(
                ",".join(
                    [records[0].algo, records[0].graph, name]
                    + [repr(float(x)) for x in stat]
                )
            )
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def read_results(path: str | Path) -> tuple[list[RunRecord], dict[str, dict[str, float]]]:
    """Parse a results CSV back into records and aggregate rows."""
    text = Path(path).read_text().strip().splitlines()
    if not text or text[0] != RESULTS_HEADER:
        raise ValueError(f"{path}: unexpected results header")
    cols = RESULTS_HEADER.split(",")
    records: list[RunRecord] = []
    aggregates: dict[str, dict[str, float]] = {}
    for line in text[1:]:
        parts = line.split(",")
        if len(parts) != len(cols):
            raise ValueError(f"{path}: malformed row {line!r}")
        if parts[2] in ("mean", "std"):
            aggregates[parts[2]] = {
                name: float(val) for name, val in zip(cols[3:], parts[3:])
            }
            continue
        records.append(
            RunRecord(
                algo=parts[0],
                graph=parts[1],
                seed=int(parts[2]),
                budget=int(parts[3]),
                quality=float(parts[4]),
                opt=float(parts[5]),
                out_size=int(parts[6]),
                total_queries=int(parts[7]),
                single_edge_queries=int(parts[8]),
                elapsed_ms=float(parts[9]),
            )
        )
    return records, aggregates


def write_histogram(path: str | Path, histogram: dict[int, int]) -> None:
    lines = [HISTOGRAM_HEADER]
    lines.extend(f"{size},{count}" for size, count in sorted(histogram.items()))
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def knockout_weights(G: Graph, seed: int) -> np.ndarray:
    """Adversarial weights that displace the unweighted densest subgraph.

    Edges inside the unit-weight optimum S* get Uniform(1, 20) weights,
    everything else Uniform(1, 100), so the weighted optimum tends to move
    away from S*. Deterministic given the seed.
    """
    unit = np.ones(G.m)
    star = exact_densest(G, unit).subset
    inside = np.zeros(G.m, dtype=bool)
    inside[induced_edges(G, star)] = True
    rng = np.random.default_rng(seed)
    low = rng.uniform(1.0, 20.0, size=G.m)
    high = rng.uniform(1.0, 100.0, size=G.m)
    return np.where(inside, low, high)


def default_budget(n: int) -> int:
    """Smallest power of ten at or above the schedule overhead (n+1)(n+2)/2."""
    if n < 2:
        raise ValueError("need n >= 2")
    overhead = (n + 1) * (n + 2) // 2
    p = len(str(overhead)) - 1
    if 10**p < overhead:
        p += 1
    return 10**p


def _resolved(config: ExperimentConfig, G: Graph) -> ExperimentConfig:
    """Fill algorithm-specific defaults left unset."""
    algo = config.algorithm
    updates: dict[str, object] = {}
    if config.epsilon is None:
        updates["epsilon"] = 0.9 if algo == "r-oracle" else 0.1
    if config.budget is None:
        if algo == "dssr":
            updates["budget"] = default_budget(G.n)
        elif algo == "naive":
            updates["budget"] = G.m + 10000
    if config.max_iters is None and algo == "dslin":
        updates["max_iters"] = G.m + 10000
    return replace(config, **updates) if updates else config


def run_experiment(config: ExperimentConfig) -> list[RunRecord]:
    """Execute one batch; returns per-seed records (failures are logged to
    errors.log under the output directory and skipped)."""
    config.validate()
    G = load_edge_list(config.graph)
    w = load_weights(config.weights, G)
    config = _resolved(config, G)
    graph_name = Path(config.graph).stem
    opt = exact_densest(G, w).value
    out_dir = Path(config.out) if config.out else None

    family = None
    if config.algorithm in ("dslin", "naive"):
        family = generate_arm_family(G, config.k, config.family_seed)

    records: list[RunRecord] = []
    errors: list[str] = []
    for seed in config.seeds:
        t0 = time.perf_counter()
        try:
            record = _run_one(config, G, w, family, graph_name, opt, seed)
        except Exception as exc:  # noqa: BLE001 - batch keeps going per seed
            errors.append(f"seed {seed}: {type(exc).__name__}: {exc}")
            continue
        elapsed_ms = (time.perf_counter() - t0) * 1000.0
        record = replace(record, elapsed_ms=elapsed_ms)
        if record.quality > record.opt + 1e-9:
            raise RuntimeError(
                f"seed {seed}: quality {record.quality} exceeds OPT {record.opt}"
            )
        records.append(record)

    if out_dir is not None:
        write_results(out_dir / "results.csv", records)
        if errors:
            _atomic_write(out_dir / "errors.log", "\n".join(errors) + "\n")
    return records


def _run_one(
    config: ExperimentConfig,
    G: Graph,
    w: np.ndarray,
    family,
    graph_name: str,
    opt: float,
    seed: int,
) -> RunRecord:
    algo = config.algorithm
    out_dir = Path(config.out) if config.out else None
    noise = NoiseModel(kind=config.noise, R=config.R) if config.noise != "none" else NoiseModel("none")
    hist: dict[int, int] | None = None
    total = single = 0
    budget = 0

    if algo == "exact":
        subset = exact_densest(G, w).subset
    elif algo == "brute":
        subset = brute_force_densest(G, w).subset
    elif algo == "g-oracle":
        subset, _ = greedy_peeling(G, w)
    elif algo == "dssr":
        oracle = make_oracle(G, w, noise, seed)
        budget = int(config.budget)
        subset, diag = run_dssr(G, oracle, budget)
        hist = dict(oracle.histogram)
        total, single = oracle.total_queries, oracle.single_edge_queries
        if out_dir is not None:
            rows = ["phase,survivors,f_hat,cum_queries,cum_single_edge"]
            rows.extend(
                f"{p},{s},{float(f)!r},{q},{sq}" for p, s, f, q, sq in diag.phase_rows
            )
            _atomic_write(out_dir / f"{algo}_{graph_name}_seed{seed}_trace.csv", "\n".join(rows) + "\n")
    elif algo == "naive":
        oracle = make_oracle(G, w, noise, seed)
        budget = int(config.budget)
        subset = run_naive(G, family, oracle, budget)
        hist = dict(oracle.histogram)
        total, single = oracle.total_queries, oracle.single_edge_queries
    elif algo == "dslin":
        oracle = make_oracle(G, w, noise, seed)
        budget = int(config.max_iters)
        params = DsLinParams(
            epsilon=float(config.epsilon),
            delta=config.delta,
            lam=config.lam,
            R=config.R,
            L=config.L,
        )
        subset, diag = run_dslin(
            G, family, oracle, params, budget, stop_mode=config.stop_mode, w_true=w
        )
        hist = dict(oracle.histogram)
        total, single = oracle.total_queries, oracle.single_edge_queries
        if out_dir is not None:
            rows = ["iteration,incumbent_density,c_t,est_err"]
            base_t = G.m
            for i, (f, c) in enumerate(zip(diag.incumbent_density_trace, diag.ct_trace)):
                err = repr(float(diag.est_err_trace[i])) if diag.est_err_trace else ""
                rows.append(f"{base_t + i},{float(f)!r},{float(c)!r},{err}")
            _atomic_write(out_dir / f"{algo}_{graph_name}_seed{seed}_trace.csv", "\n".join(rows) + "\n")
    elif algo == "r-oracle":
        oracle = make_oracle(G, w, noise, seed)
        subset = run_r_oracle(G, w, oracle, gamma=config.gamma, eps=float(config.epsilon))
        hist = dict(oracle.histogram)
        total, single = oracle.total_queries, oracle.single_edge_queries
        budget = total
    else:  # pragma: no cover - validate() already rejects
        raise ConfigError(f"unknown algorithm {algo!r}")

    hist_path = None
    if hist is not None and out_dir is not None:
        hist_path = str(out_dir / f"{algo}_{graph_name}_seed{seed}_hist.csv")
        write_histogram(hist_path, hist)

    return RunRecord(
        algo=algo,
        graph=graph_name,
        seed=seed,
        budget=budget,
        quality=density(G, w, subset),
        opt=opt,
        out_size=len(subset),
        total_queries=total,
        single_edge_queries=single,
        elapsed_ms=0.0,
        histogram_path=hist_path,
    )


def generate_weight_file(graph_path: str | Path, seed: int, out_path: str | Path) -> np.ndarray:
    """gen-weights entry: knockout weights for a graph, written atomically."""
    G = load_edge_list(graph_path)
    w = knockout_weights(G, seed)
    save_weights(out_path, G, w)
    return w
