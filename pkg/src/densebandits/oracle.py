"""Stochastic oracle producing noisy sums of edge weights over queried subsets.

Each query of an edge subset F draws fresh per-edge noise and returns
sum_{e in F} (w_e + eta_e), so the observation is sub-Gaussian with scale
sqrt(|F|) * R around the true sum. Streams are counter-based (Philox keyed by
the oracle seed, counter block indexed by the running query number), which
makes every observation sequence reproducible and platform independent.
The true weights are held privately; algorithms only see observations and
the public query counters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, as_weight_vector, star_edges

NOISE_KINDS = ("gaussian-per-edge", "none")

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class NoiseModel:
    """Per-edge noise settings: iid N(0, R^2) per edge, or none."""

    kind: str = "gaussian-per-edge"
    R: float = 1.0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; use one of {NOISE_KINDS}")
        if self.kind == "gaussian-per-edge":
            if not (np.isfinite(self.R) and self.R > 0):
                raise ValueError("gaussian noise needs finite R > 0")


@dataclass
class SamplingOracle:
    """Single-owner mutable sampler with full query accounting.

    ``total_queries`` counts every call, ``single_edge_queries`` those with
    |F| = 1, and ``histogram`` maps query size to count. The histogram total
    always equals ``total_queries``.
    """

    graph: Graph
    _w: np.ndarray
    noise: NoiseModel
    seed: int
    total_queries: int = 0
    single_edge_queries: int = 0
    histogram: dict[int, int] = field(default_factory=dict)

    def _noise_for(self, size: int) -> np.ndarray:
        bg = np.random.Philox(key=self.seed, counter=[0, 0, self.total_queries, 0])
        return np.random.Generator(bg).normal(0.0, self.noise.R, size=size)

    def sample_edges(self, F) -> float:
        """One noisy observation of the edge subset F (ascending-index sum)."""
        idxs = sorted(int(e) for e in F)
        if not idxs:
            raise ValueError("cannot sample an empty edge subset")
        if len(set(idxs)) != len(idxs):
            raise ValueError("edge subset contains duplicates")
        if idxs[0] < 0 or idxs[-1] >= self.graph.m:
            raise ValueError("edge index out of range")
        vals = self._w[idxs]
        if self.noise.kind == "gaussian-per-edge":
            vals = vals + self._noise_for(len(idxs))
        obs = float(vals.sum())
        self.total_queries += 1
        if len(idxs) == 1:
            self.single_edge_queries += 1
        self.histogram[len(idxs)] = self.histogram.get(len(idxs), 0) + 1
        return obs

    def sample_vertex_star(self, G: Graph, S, v: int) -> float:
        """One noisy observation of the edges joining v to the rest of S."""
        idxs = star_edges(G, S, v)
        if not idxs:
            raise ValueError(f"vertex {v} has no neighbors in S; handle the zero-degree case upstream")
        return self.sample_edges(idxs)


def make_oracle(G: Graph, w, noise: NoiseModel | str = "gaussian-per-edge", seed: int = 0) -> SamplingOracle:
    """Construct a seeded oracle over hidden true weights."""
    if isinstance(noise, str):
        noise = NoiseModel(kind=noise)
    w = as_weight_vector(G, w)
    return SamplingOracle(graph=G, _w=w.copy(), noise=noise, seed=int(seed) & _SEED_MASK)


def sample_edges(oracle: SamplingOracle, F) -> float:
    return oracle.sample_edges(F)


def sample_vertex_star(oracle: SamplingOracle, G: Graph, S, v: int) -> float:
    return oracle.sample_vertex_star(G, S, v)
