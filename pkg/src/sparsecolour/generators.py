"""Deterministic and seeded graph generators used by the CLI and tests."""

from __future__ import annotations

import random

from .graph import Graph, GraphError


def empty_graph(n: int) -> Graph:
    return Graph.from_edges(n, [])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    return Graph.from_edges(10, outer + inner + spokes)


def gnp_graph(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p) with a fixed seed."""
    rng = random.Random(seed)
    edges = [
        (u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p
    ]
    return Graph.from_edges(n, edges)


def random_regular_graph(n: int, d: int, seed: int) -> Graph:
    """Random d-regular graph via the configuration model with restarts.

    Pairs up d stubs per vertex uniformly at random and retries whenever the
    pairing produces a loop or parallel edge that cannot be repaired.
    """
    if n * d % 2 != 0:
        raise GraphError("n * d must be even")
    if not 0 <= d < n:
        raise GraphError("need 0 <= d < n")
    rng = random.Random(seed)
    while True:
        edges = _try_configuration(n, d, rng)
        if edges is not None:
            return Graph.from_edges(n, sorted(edges))


def _try_configuration(n: int, d: int, rng: random.Random):
    edges: set[tuple[int, int]] = set()
    stubs = [v for v in range(n) for _ in range(d)]
    while stubs:
        rng.shuffle(stubs)
        leftover: list[int] = []
        it = iter(stubs)
        for u, v in zip(it, it):
            if u > v:
                u, v = v, u
            if u != v and (u, v) not in edges:
                edges.add((u, v))
            else:
                leftover.extend((u, v))
        if leftover and not _repairable(edges, leftover):
            return None
        stubs = leftover
    return edges


def _repairable(edges: set[tuple[int, int]], stubs: list[int]) -> bool:
    # Some pair of leftover stubs must still admit a fresh edge.
    uniq = sorted(set(stubs))
    for i, u in enumerate(uniq):
        for v in uniq[i + 1 :]:
            if (u, v) not in edges:
                return True
    return False
