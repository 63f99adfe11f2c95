#!/usr/bin/env python3
"""Regenerate the edge lists under data/.

karate and lesmis are the classic networks as shipped with networkx. polbooks
is a synthetic stand-in with the canonical size (105 vertices, 441 edges),
generated deterministically; the real network is not redistributable here.
"""

import os
import sys

import networkx as nx
import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, os.pardir, "data")


def community_graph_105_441(seed: int = 5) -> list[tuple[int, int]]:
    """7 communities of 15 vertices, dense inside and sparse across, trimmed
    or padded deterministically to exactly 441 edges."""
    blocks = [15] * 7
    probs = [[0.55 if i == j else 0.012 for j in range(7)] for i in range(7)]
    g = nx.stochastic_block_model(blocks, probs, seed=seed)
    g.remove_edges_from(nx.selfloop_edges(g))
    rng = np.random.default_rng(seed)
    edges = sorted(tuple(sorted(e)) for e in g.edges())
    while len(edges) > 441:
        edges.pop(int(rng.integers(len(edges))))
    existing = set(edges)
    while len(edges) < 441:
        u, v = int(rng.integers(105)), int(rng.integers(105))
        if u != v and (min(u, v), max(u, v)) not in existing:
            e = (min(u, v), max(u, v))
            existing.add(e)
            edges.append(e)
    return sorted(edges)


def write_edges(path: str, header: str, n: int, pairs, labels=None) -> None:
    lines = [f"# {header}", f"# {n} vertices, {len(pairs)} edges"]
    for u, v in pairs:
        if labels is None:
            lines.append(f"{u} {v}")
        else:
            lines.append(f"{labels[u]} {labels[v]}")
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)
    print(f"wrote {path}: {n} vertices, {len(pairs)} edges")


def main() -> int:
    os.makedirs(DATA, exist_ok=True)

    kg = nx.karate_club_graph()
    write_edges(
        os.path.join(DATA, "karate.txt"),
        "Zachary karate club",
        kg.number_of_nodes(),
        sorted(tuple(sorted(e)) for e in kg.edges()),
    )

    lg = nx.les_miserables_graph()
    names = sorted(lg.nodes())
    idx = {v: i for i, v in enumerate(names)}
    pairs = sorted(tuple(sorted((idx[u], idx[v]))) for u, v in lg.edges())
    write_edges(
        os.path.join(DATA, "lesmis.txt"),
        "Les Miserables character co-occurrence",
        lg.number_of_nodes(),
        pairs,
        labels=[name.replace(" ", "_") for name in names],
    )

    pairs = community_graph_105_441()
    write_edges(
        os.path.join(DATA, "polbooks.txt"),
        "synthetic stand-in for the political-books network (same size, community-structured)",
        105,
        pairs,
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
