"""Fixed-confidence subset-query bandit for densest subgraph discovery.

Arms are vertex subsets; pulling an arm observes a noisy sum of the weights
of its induced edges. A ridge least-squares estimate of the per-edge weight
vector is maintained incrementally (rank-1 Sherman-Morrison updates of the
inverse design matrix, matrix-determinant-lemma updates of the
log-determinant). Each round solves the densest-subgraph problem exactly
under the current estimate and tests an ellipsoidal stopping condition: stop
once the incumbent's pessimistic density beats every rival's optimistic
density up to the slack epsilon.

The confidence radius is

    C_t = R' * sqrt(log det A_t - m log(lambda) - 2 log(delta))
          + sqrt(lambda) * L,     R' = sqrt(deg_max) * R,

valid because a size-d star query carries d independent noise terms, and the
rival-side spread is bounded by the box maximum of ||x||_{A^-1} over
x in [-1, 1]^m (computed exactly by vertex enumeration for small m, and by
the entrywise-absolute-sum relaxation otherwise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, as_vertex_set, density, induced_edges, max_degree
from .solvers import exact_densest, second_best_density

_EXACT_QP_LIMIT = 22
_RANK_TOL = 1e-8
_REFRESH_EVERY = 256

STOP_MODES = ("conservative", "exact-second-best")


@dataclass(frozen=True)
class ArmFamily:
    """Queryable vertex subsets with cached induced-edge supports.

    Every arm has at least ``k`` vertices and a nonempty induced edge set,
    and the stacked edge indicators span R^m so the weight vector is
    identifiable. ``p`` is the sampling allocation over arms.
    """

    arms: tuple[tuple[int, ...], ...]
    edge_sets: tuple[tuple[int, ...], ...]
    p: np.ndarray
    k: int


@dataclass(frozen=True)
class DsLinParams:
    """Hyperparameters: slack epsilon, failure rate delta, ridge lambda,
    per-edge noise scale R, and the weight-norm bound L."""

    epsilon: float = 0.1
    delta: float = 0.1
    lam: float = 1.0
    R: float = 1.0
    L: float | None = None

    def __post_init__(self):
        if not (self.epsilon > 0):
            raise ValueError("epsilon must be > 0")
        if not (0 < self.delta <= 1):
            raise ValueError("delta must lie in (0, 1]")
        if not (self.lam > 0):
            raise ValueError("lambda must be > 0")
        if self.R < 0:
            raise ValueError("R must be >= 0")
        if self.L is not None and self.L < 0:
            raise ValueError("L must be >= 0")


@dataclass
class DesignState:
    """Mutable ridge-regression state shared by one run."""

    G: Graph
    family: ArmFamily
    params: DsLinParams
    L: float
    Rprime: float
    t: int
    A: np.ndarray
    A_inv: np.ndarray
    logdetA: float
    b: np.ndarray
    counts: np.ndarray
    chi: np.ndarray


@dataclass
class DsLinDiagnostics:
    iterations: int = 0
    stopped: bool = False
    capped: bool = False
    ct_trace: list[float] = field(default_factory=list)
    incumbent_density_trace: list[float] = field(default_factory=list)
    est_err_trace: list[float] | None = None
    arm_counts: np.ndarray | None = None
    state: DesignState | None = None


def _indicator(m: int, edge_idxs) -> np.ndarray:
    chi = np.zeros(m)
    chi[list(edge_idxs)] = 1.0
    return chi


def _spanning_rank(vectors: list[np.ndarray]) -> int:
    """Rank of a stack of vectors via incremental Gram-Schmidt (1e-8 cut)."""
    basis: list[np.ndarray] = []
    for v in vectors:
        r = v.astype(np.float64).copy()
        for q in basis:
            r -= (q @ r) * q
        nrm = float(np.linalg.norm(r))
        if nrm > _RANK_TOL:
            basis.append(r / nrm)
    return len(basis)


def make_arm_family(G: Graph, arms, p=None, k: int = 3) -> ArmFamily:
    """Validate and cache an arm family over G.

    Raises if any arm is smaller than k or induces no edges, if p is not a
    probability vector, or if the indicators do not span R^m.
    """
    if k <= 2:
        raise ValueError("minimum queryable size k must exceed 2")
    norm_arms = tuple(as_vertex_set(G, a) for a in arms)
    if not norm_arms:
        raise ValueError("arm family is empty")
    edge_sets = []
    for a in norm_arms:
        if len(a) < k:
            raise ValueError(f"arm {a} smaller than k={k}")
        es = tuple(induced_edges(G, a))
        if not es:
            raise ValueError(f"arm {a} induces no edges and cannot be sampled")
        edge_sets.append(es)
    if p is None:
        p = np.full(len(norm_arms), 1.0 / len(norm_arms))
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (len(norm_arms),) or np.any(p < 0) or abs(float(p.sum()) - 1.0) > 1e-12:
        raise ValueError("allocation p must be a probability vector over the arms")
    indicators = [_indicator(G.m, es) for es in edge_sets]
    if _spanning_rank(indicators) != G.m:
        raise ValueError("arm indicators do not span all edge coordinates")
    return ArmFamily(arms=norm_arms, edge_sets=tuple(edge_sets), p=p, k=k)


def generate_arm_family(G: Graph, k: int, seed: int, max_attempts: int | None = None) -> ArmFamily:
    """Random rank-spanning family: sizes uniform on [k, n], members uniform,
    an arm kept only when it raises the span of the stacked indicators.
    Stops with exactly m arms; errors out if the attempt cap is hit."""
    if not (2 < k <= G.n):
        raise ValueError(f"need 2 < k <= n, got k={k}, n={G.n}")
    rng = np.random.default_rng(seed)
    if max_attempts is None:
        max_attempts = 1000 * G.m + 10000
    basis: list[np.ndarray] = []
    arms: list[tuple[int, ...]] = []
    edge_sets: list[tuple[int, ...]] = []
    for _ in range(max_attempts):
        if len(arms) == G.m:
            break
        size = int(rng.integers(k, G.n + 1))
        members = tuple(sorted(int(v) for v in rng.choice(G.n, size=size, replace=False)))
        es = induced_edges(G, members)
        if not es:
            continue
        r = _indicator(G.m, es)
        for q in basis:
            r -= (q @ r) * q
        nrm = float(np.linalg.norm(r))
        if nrm <= _RANK_TOL:
            continue
        basis.append(r / nrm)
        arms.append(members)
        edge_sets.append(tuple(es))
    if len(arms) != G.m:
        raise ValueError(
            f"could not span all {G.m} edges with random size-[{k},{G.n}] arms "
            f"after {max_attempts} attempts"
        )
    p = np.full(len(arms), 1.0 / len(arms))
    return ArmFamily(arms=tuple(arms), edge_sets=tuple(edge_sets), p=p, k=k)


def default_weight_norm_bound(G: Graph, w_max: float = 100.0) -> float:
    """Fallback L when no tighter bound is known: sqrt(m) * w_max."""
    return math.sqrt(G.m) * w_max


def init_state(G: Graph, family: ArmFamily, params: DsLinParams) -> DesignState:
    m = G.m
    L = params.L if params.L is not None else default_weight_norm_bound(G)
    chi = np.stack([_indicator(m, es) for es in family.edge_sets])
    return DesignState(
        G=G,
        family=family,
        params=params,
        L=float(L),
        Rprime=math.sqrt(max_degree(G)) * params.R,
        t=0,
        A=params.lam * np.eye(m),
        A_inv=np.eye(m) / params.lam,
        logdetA=m * math.log(params.lam),
        b=np.zeros(m),
        counts=np.zeros(len(family.arms), dtype=np.int64),
        chi=chi,
    )


def select_arm(state: DesignState, family: ArmFamily) -> int:
    """Index minimizing pull-count / allocation over the support of p;
    ties go to the lowest index."""
    support = np.flatnonzero(family.p > 0)
    if support.size == 0:
        raise ValueError("allocation has empty support")
    ratios = state.counts[support] / family.p[support]
    return int(support[np.argmin(ratios)])


def update(state: DesignState, arm: int, reward: float) -> None:
    """Rank-1 update after observing ``reward`` on ``arm``.

    The log-determinant is advanced before the inverse (the determinant
    lemma needs the old inverse); the inverse then gets the Sherman-Morrison
    correction. Every 256 rounds both are re-derived densely as a drift
    check.
    """
    if not np.isfinite(reward):
        raise ValueError(f"non-finite reward {reward!r}")
    chi = state.chi[arm]
    u = state.A_inv @ chi
    s = float(chi @ u)
    state.logdetA += math.log1p(s)
    state.A += np.outer(chi, chi)
    state.A_inv -= np.outer(u, u) / (1.0 + s)
    state.b += chi * reward
    state.counts[arm] += 1
    state.t += 1
    if state.t % _REFRESH_EVERY == 0:
        fresh = np.linalg.inv(state.A)
        if not np.allclose(state.A_inv @ state.A, np.eye(state.G.m), atol=1e-8):
            raise RuntimeError("incremental inverse drifted beyond 1e-8")
        state.A_inv = fresh
        sign, logdet = np.linalg.slogdet(state.A)
        if sign <= 0 or abs(logdet - state.logdetA) > 1e-6:
            raise RuntimeError("incremental log-determinant drifted beyond 1e-6")
        state.logdetA = logdet


def estimate(state: DesignState) -> np.ndarray:
    """Ridge estimate A^-1 b with negative entries clipped to zero."""
    return np.clip(state.A_inv @ state.b, 0.0, None)


def confidence_radius(state: DesignState) -> float:
    m = state.G.m
    inner = state.logdetA - m * math.log(state.params.lam) - 2.0 * math.log(state.params.delta)
    if inner < -1e-9:
        raise RuntimeError("log det A fell below its lambda^m floor")
    return state.Rprime * math.sqrt(max(inner, 0.0)) + math.sqrt(state.params.lam) * state.L


def _box_qp_bound(Q: np.ndarray, exact_limit: int = _EXACT_QP_LIMIT) -> tuple[float, str]:
    m = Q.shape[0]
    if m <= exact_limit:
        best = 0.0
        total = 1 << (m - 1)
        chunk = 1 << 14
        for lo in range(0, total, chunk):
            ks = np.arange(lo, min(lo + chunk, total), dtype=np.uint64)
            X = np.ones((ks.size, m))
            for j in range(m - 1):
                X[:, j + 1] = np.where((ks >> np.uint64(j)) & np.uint64(1), 1.0, -1.0)
            vals = np.einsum("ij,jk,ik->i", X, Q, X)
            best = max(best, float(vals.max()))
        return math.sqrt(max(best, 0.0)), "exact"
    return math.sqrt(float(np.abs(Q).sum())), "relaxed"


def qp_upper_bound(A_inv: np.ndarray, exact_limit: int = _EXACT_QP_LIMIT) -> tuple[float, str]:
    """Upper bound on max ||x||_{A_inv} over the unit box [-1, 1]^m.

    Exact for m <= exact_limit: the quadratic form is convex, so the box
    maximum sits at a vertex, and x/-x coincide, leaving 2^(m-1) sign
    patterns to enumerate. Otherwise returns sqrt(sum |A_inv|), an upper
    bound since each q_ij x_i x_j <= |q_ij| on the box.
    """
    Q = np.asarray(A_inv, dtype=np.float64)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise ValueError("A_inv must be square")
    if not np.allclose(Q, Q.T, atol=1e-8):
        raise ValueError("A_inv must be symmetric")
    if float(np.linalg.eigvalsh(Q).min()) < -1e-8:
        raise ValueError("A_inv must be positive semidefinite")
    return _box_qp_bound(Q, exact_limit)


def check_stop(
    state: DesignState,
    family: ArmFamily,
    Shat,
    widthHat: float,
    U: float,
    secondBest: float | None = None,
) -> bool:
    """Ellipsoidal stopping test for the incumbent Shat.

    Fires when the incumbent's pessimistic density stays at least
    (rival optimistic density - epsilon), where the rival side is
    ``secondBest`` (the exact second-best under the estimate when supplied,
    else the conservative stand-in: the incumbent's own estimated density)
    plus C_t * U / 2.
    """
    Shat = as_vertex_set(state.G, Shat)
    what = estimate(state)
    fhat = density(state.G, what, Shat)
    C = confidence_radius(state)
    rival = fhat if secondBest is None else float(secondBest)
    lhs = fhat - C * float(widthHat) / len(Shat)
    rhs = rival + C * float(U) / 2.0 - state.params.epsilon
    return lhs >= rhs


def run_dslin(
    G: Graph,
    family: ArmFamily,
    oracle,
    params: DsLinParams,
    max_iters: int,
    stop_mode: str = "conservative",
    w_true=None,
) -> tuple[tuple[int, ...], DsLinDiagnostics]:
    """Full fixed-confidence run: m initialization pulls (one per spanning
    arm, design and response both updated), then select/sample/estimate/solve
    rounds until the stopping test fires or ``max_iters`` total rounds pass.

    Returns the final incumbent (exact densest set under the last estimate)
    and diagnostics with per-round traces.
    """
    if stop_mode not in STOP_MODES:
        raise ValueError(f"stop_mode must be one of {STOP_MODES}")
    m = G.m
    if max_iters < m:
        raise ValueError(f"max_iters={max_iters} is below the m={m} initialization rounds")
    state = init_state(G, family, params)
    diag = DsLinDiagnostics(est_err_trace=[] if w_true is not None else None, state=state)
    for arm in range(m):
        reward = oracle.sample_edges(family.edge_sets[arm])
        update(state, arm, reward)

    incumbent: tuple[int, ...] = (0,)
    while True:
        what = estimate(state)
        res = exact_densest(G, what)
        incumbent = res.subset
        diag.ct_trace.append(confidence_radius(state))
        diag.incumbent_density_trace.append(res.value)
        if w_true is not None:
            diag.est_err_trace.append(float(np.abs(w_true - what).sum()) / m)
        if state.t >= max_iters:
            diag.capped = True
            break
        chi_hat = _indicator(m, induced_edges(G, incumbent))
        width = math.sqrt(max(float(chi_hat @ state.A_inv @ chi_hat), 0.0))
        U, _ = _box_qp_bound(state.A_inv)
        second = None
        if stop_mode == "exact-second-best" and G.n >= 2:
            second = second_best_density(G, what, incumbent)
        if check_stop(state, family, incumbent, width, U, second):
            diag.stopped = True
            break
        arm = select_arm(state, family)
        reward = oracle.sample_edges(family.edge_sets[arm])
        update(state, arm, reward)

    diag.iterations = state.t
    diag.arm_counts = state.counts.copy()
    return incumbent, diag
