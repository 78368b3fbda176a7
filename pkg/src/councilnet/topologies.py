"""Canonical and random topologies used by the test harness and demos."""

from __future__ import annotations

import itertools
import random

from .graph import Topology, build_topology, is_connected, topology_from_edges

TWO_CLUSTER_SEVEN_EDGES = (
    (1, 2), (1, 3), (1, 5), (3, 5),
    (4, 5), (4, 6), (4, 7), (6, 7),
)

# Chain of four islands whose councils come out at sizes 3, 2, 4 and 5; the
# last island is six mutually connected nodes of which one (node 12) serves
# as the gateway out, leaving the other five as heads.
SIZE_LADDER_EDGES = (
    (1, 2), (1, 3), (2, 3),
    (3, 4), (4, 5), (5, 6), (6, 7), (7, 8),
    (8, 9), (8, 10), (8, 11), (9, 10), (9, 11), (10, 11),
    (8, 12),
    (12, 13), (12, 14), (12, 15), (12, 16), (12, 17),
    (13, 14), (13, 15), (13, 16), (13, 17),
    (14, 15), (14, 16), (14, 17),
    (15, 16), (15, 17),
    (16, 17),
)


def two_cluster_seven() -> Topology:
    """Seven nodes forming two adjacent clusters joined through one gateway.

    Election yields heads {1, 4} with node 5 bridging them; council
    formation then yields the three-head council {1, 3, 5} and the lone
    head 6, with node 4 as the gateway between the two clusters.
    """
    return topology_from_edges(range(1, 8), TWO_CLUSTER_SEVEN_EDGES)


def triangle() -> Topology:
    return complete_graph(3)


def complete_graph(n: int, first: int = 1) -> Topology:
    nodes = range(first, first + n)
    return topology_from_edges(nodes, itertools.combinations(nodes, 2))


def star(leaves: int, center: int = 1) -> Topology:
    nodes = range(center, center + leaves + 1)
    return topology_from_edges(nodes, ((center, leaf) for leaf in range(center + 1, center + leaves + 1)))


def size_ladder() -> Topology:
    """Seventeen nodes whose clusters exercise council sizes 2 through 5."""
    return topology_from_edges(range(1, 18), SIZE_LADDER_EDGES)


def random_connected(
    n: int,
    seed: int,
    area: float = 1.0,
    radius: float | None = None,
    max_tries: int = 500,
) -> Topology:
    """Random connected unit-disk graph: n points uniform in a square.

    The default radius sits comfortably above the connectivity threshold for
    uniform placements, and placements are redrawn until connected.
    Deterministic for a given seed.
    """
    if n < 1:
        raise ValueError("need at least one node")
    if radius is None:
        import math

        radius = area * 1.8 * math.sqrt(math.log(max(n, 2)) / (math.pi * n))
    rng = random.Random(seed)
    for _ in range(max_tries):
        specs = [(i, (rng.uniform(0.0, area), rng.uniform(0.0, area))) for i in range(1, n + 1)]
        t = build_topology(specs, radius)
        if is_connected(t):
            return t
    raise RuntimeError(f"no connected placement found for n={n} seed={seed} after {max_tries} tries")
