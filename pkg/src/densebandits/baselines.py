"""Comparison baselines: uniform arm sampling and interval-guided
single-edge sampling.

``run_naive`` pulls a uniformly random arm each round, splits the observed
subset sum equally over the arm's induced edges, and keeps per-edge running
averages; one exact solve on the averages produces the output.

``run_r_oracle`` is granted interval side information around the hidden
truth (l_e = max(w_e - 1, 0), r_e = w_e + 1 by default), samples every edge
individually often enough to pin down its mean, clips the empirical means
back into the intervals, and solves exactly on the resulting lower bounds.
"""

from __future__ import annotations

import math

import numpy as np

from .dslin import ArmFamily
from .graph import Graph, as_weight_vector
from .oracle import SamplingOracle
from .solvers import exact_densest


def run_naive(
    G: Graph,
    family: ArmFamily,
    oracle: SamplingOracle,
    T: int,
    rng: np.random.Generator | None = None,
    detail: bool = False,
):
    """Uniform-arm baseline under a budget of T rounds.

    Arms with no induced edges burn their round without an oracle call (the
    oracle refuses empty subsets). Negative running averages are clipped to
    zero before the final exact solve, mirroring the estimator clipping of
    the fixed-confidence algorithm. With ``detail`` the per-edge averages
    and visit counts are returned alongside the chosen set.
    """
    if T < 1:
        raise ValueError("budget T must be at least 1")
    if not family.arms:
        raise ValueError("arm family is empty")
    if rng is None:
        rng = np.random.default_rng(oracle.seed)
    w_avg = np.zeros(G.m)
    visits = np.zeros(G.m, dtype=np.int64)
    for _ in range(T):
        arm = int(rng.integers(len(family.arms)))
        es = family.edge_sets[arm]
        if not es:
            continue
        share = oracle.sample_edges(es) / len(es)
        for e in es:
            visits[e] += 1
            w_avg[e] += (share - w_avg[e]) / visits[e]
    subset = exact_densest(G, np.clip(w_avg, 0.0, None)).subset
    if detail:
        return subset, w_avg, visits
    return subset


def run_r_oracle(
    G: Graph,
    w_true_hidden,
    oracle: SamplingOracle,
    gamma: float = 0.9,
    eps: float = 0.9,
    literal_intervals: bool = False,
    intervals: tuple[np.ndarray, np.ndarray] | None = None,
    detail: bool = False,
):
    """Interval baseline: per-edge sampling with robust clipping.

    Interval construction from the hidden truth uses l_e = max(w_e - 1, 0)
    unless ``literal_intervals`` asks for l_e = min(w_e - 1, 0), whose lower
    bounds are nonpositive and (clipped at zero for the solve) make the
    lower-bound density collapse to zero, which raises the degenerate-
    interval error below. Custom ``intervals`` override the construction.

    Each non-degenerate edge e is sampled

        t_e = ceil(m (r_e-l_e)^2 ln(2m/gamma) / (eps^2 f_minus^2))

    times (all single-edge queries), where f_minus is the exact optimal
    density under the lower bounds; the empirical mean is clipped into
    [l_e, r_e] and then tightened to half-width eps*f_minus/sqrt(2m). The
    output is the exact maximizer under the tightened lower bounds.
    """
    if not (0 < gamma < 1):
        raise ValueError("gamma must lie in (0, 1)")
    if eps <= 0:
        raise ValueError("eps must be positive")
    w = as_weight_vector(G, w_true_hidden)
    m = G.m
    if intervals is not None:
        lo = np.asarray(intervals[0], dtype=np.float64)
        hi = np.asarray(intervals[1], dtype=np.float64)
        if lo.shape != (m,) or hi.shape != (m,) or np.any(lo > hi):
            raise ValueError("intervals must be two length-m arrays with lo <= hi")
    elif literal_intervals:
        lo = np.minimum(w - 1.0, 0.0)
        hi = w + 1.0
    else:
        lo = np.maximum(w - 1.0, 0.0)
        hi = w + 1.0
    base = exact_densest(G, np.clip(lo, 0.0, None))
    f_minus = base.value
    if f_minus <= 0.0:
        raise ValueError(
            "degenerate intervals: the lower-bound weights have zero optimal "
            "density, so the per-edge sample count is undefined"
        )
    half = eps * f_minus / math.sqrt(2.0 * m)
    log_term = math.log(2.0 * m / gamma)
    l_out = lo.copy()
    r_out = hi.copy()
    samples = np.zeros(m, dtype=np.int64)
    for e in range(m):
        if lo[e] >= hi[e]:
            continue
        t_e = math.ceil(m * (hi[e] - lo[e]) ** 2 * log_term / (eps**2 * f_minus**2))
        draws = [oracle.sample_edges([e]) for _ in range(t_e)]
        samples[e] = t_e
        p_hat = min(max(math.fsum(draws) / t_e, lo[e]), hi[e])
        l_out[e] = max(lo[e], p_hat - half)
        r_out[e] = min(hi[e], p_hat + half)
    subset = exact_densest(G, np.clip(l_out, 0.0, None)).subset
    if detail:
        return subset, l_out, r_out, samples
    return subset
