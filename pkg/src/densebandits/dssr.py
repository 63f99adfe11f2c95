"""Fixed-budget densest-subgraph identification by successive vertex rejects.

The total query budget T is split across n-1 phases; phase t issues star
queries (all edges joining a vertex to the current survivors) to refresh
empirical weighted degrees, then evicts the vertex with the smallest
estimate. Observations are reused across phases: a vertex untouched by the
last removal keeps its history and only tops it up with tau_t fresh
observations, while neighbors of the removed vertex (whose star changed)
discard history and take a full complement of fresh observations. The
output is the surviving prefix with the best empirical quality.

Budget bookkeeping follows the harmonic schedule

    T_tilde(t) = ceil((T - overhead) / (H(n-1) * (n - t))),
    T_prime(t) = ceil(T_tilde(t) / (2 * (n - t + 1))),
    tau(t)     = T_prime(t) - T_prime(t-1),

with overhead = (n+1)(n+2)/2 and H the harmonic sum, which keeps the total
number of oracle calls at or below T on every run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, star_edges
from .oracle import SamplingOracle


@dataclass(frozen=True)
class BudgetSchedule:
    """Precomputed per-phase sampling quotas for a run of n-1 phases."""

    T: int
    n: int
    harmonic: float
    overhead: int
    T_tilde: tuple[int, ...]
    T_prime: tuple[int, ...]
    tau: tuple[int, ...]


@dataclass
class PeelingState:
    """Mutable survivor set plus per-vertex empirical degree estimates."""

    G: Graph
    oracle: SamplingOracle
    alive: np.ndarray
    est: np.ndarray
    counts: np.ndarray
    last_removed: int | None = None


@dataclass
class DssrDiagnostics:
    removal_order: list[int] = field(default_factory=list)
    fhat_trace: list[float] = field(default_factory=list)
    phase_rows: list[tuple[int, int, float, int, int]] = field(default_factory=list)
    best_phase_size: int = 0
    total_queries: int = 0
    single_edge_queries: int = 0
    histogram: dict[int, int] = field(default_factory=dict)


def build_schedule(T: int, n: int) -> BudgetSchedule:
    """Quotas for budget T on n vertices; rejects T at or below the overhead."""
    if n < 2:
        raise ValueError("need at least two vertices to run a peeling phase")
    overhead = (n + 1) * (n + 2) // 2
    if T <= overhead:
        raise ValueError(
            f"budget T={T} too small: the schedule needs T > {overhead} "
            f"(minimum feasible T is {overhead + 1})"
        )
    harmonic = sum(1.0 / i for i in range(1, n))
    spend = T - overhead
    T_tilde: list[int] = []
    T_prime: list[int] = []
    tau: list[int] = []
    prev = 0
    for t in range(1, n):
        tt = math.ceil(spend / (harmonic * (n - t)))
        tp = math.ceil(tt / (2 * (n - t + 1)))
        T_tilde.append(tt)
        T_prime.append(tp)
        step = tp - prev
        if step < 0:
            raise AssertionError("per-phase quota decreased; schedule is inconsistent")
        tau.append(step)
        prev = tp
    return BudgetSchedule(
        T=T,
        n=n,
        harmonic=harmonic,
        overhead=overhead,
        T_tilde=tuple(T_tilde),
        T_prime=tuple(T_prime),
        tau=tuple(tau),
    )


def _fresh_mean(oracle: SamplingOracle, star: list[int], k: int) -> float:
    obs = [oracle.sample_edges(star) for _ in range(k)]
    first = obs[0]
    if all(o == first for o in obs):
        # mean of identical values is that value; fsum(k*x)/k can be an
        # ulp off, which would perturb tie-breaks in the noise-free regime
        return first
    return math.fsum(obs) / k


def sample_phase_vertex(state: PeelingState, schedule: BudgetSchedule, t: int, v: int) -> None:
    """Refresh the degree estimate of surviving vertex v in phase t.

    Three cases: no surviving neighbors (exact zero, no queries); star
    unchanged since the last removal (tau_t fresh observations merged into
    the carried estimate by count-weighted average); star changed because v
    neighbored the removed vertex (history dropped, T_prime(t) fresh
    observations). Phase 1 has no prior removal, so every vertex takes the
    merge branch starting from an empty history.
    """
    if not state.alive[v]:
        raise ValueError(f"vertex {v} was already removed")
    members = np.flatnonzero(state.alive)
    star = star_edges(state.G, members, v)
    if not star:
        state.est[v] = 0.0
        state.counts[v] = 0
        return
    changed = state.last_removed is not None and any(
        u == state.last_removed for u, _ in state.G.adjacency[v]
    )
    if changed:
        k = schedule.T_prime[t - 1]
        state.est[v] = _fresh_mean(state.oracle, star, k)
        state.counts[v] = k
    else:
        k = schedule.tau[t - 1]
        if k == 0:
            return
        fresh = _fresh_mean(state.oracle, star, k)
        c = int(state.counts[v])
        if c == 0 or fresh == state.est[v]:
            # exact: averaging equal values (or an empty history) must not
            # round, or noise-free ties would resolve against greedy peeling
            state.est[v] = fresh
        else:
            state.est[v] = (c * state.est[v] + k * fresh) / (c + k)
        state.counts[v] = c + k


def run_dssr(G: Graph, oracle: SamplingOracle, T: int) -> tuple[tuple[int, ...], DssrDiagnostics]:
    """Run the full budgeted peel; returns the best empirical prefix.

    Ties: the eviction takes the smallest vertex index among the minimal
    estimates, and the returned prefix is the earliest (largest) one, so a
    noise-free run reproduces greedy peeling exactly.
    """
    schedule = build_schedule(T, G.n)
    state = PeelingState(
        G=G,
        oracle=oracle,
        alive=np.ones(G.n, dtype=bool),
        est=np.zeros(G.n),
        counts=np.zeros(G.n, dtype=np.int64),
    )
    diag = DssrDiagnostics()
    start_total = oracle.total_queries
    best_f = -math.inf
    best_set: tuple[int, ...] = tuple(range(G.n))
    for t in range(1, G.n):
        members = np.flatnonzero(state.alive)
        for v in members:
            sample_phase_vertex(state, schedule, t, int(v))
        fhat = 0.5 * float(state.est[members].sum()) / members.size
        diag.fhat_trace.append(fhat)
        diag.phase_rows.append(
            (t, int(members.size), fhat, oracle.total_queries, oracle.single_edge_queries)
        )
        if fhat > best_f:
            best_f = fhat
            best_set = tuple(int(x) for x in members)
        evict = int(members[np.argmin(state.est[members])])
        diag.removal_order.append(evict)
        state.alive[evict] = False
        state.last_removed = evict
    used = oracle.total_queries - start_total
    if used > T:
        raise RuntimeError(f"budget violated: issued {used} queries with T={T}")
    diag.best_phase_size = len(best_set)
    diag.total_queries = used
    diag.single_edge_queries = oracle.single_edge_queries
    diag.histogram = dict(oracle.histogram)
    return best_set, diag
