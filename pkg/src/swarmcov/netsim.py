"""Instantaneous link graph, hop-count routing tables and neighborhoods.

Routing is exact all-pairs shortest hop count over the sampled link graph,
recomputed every timestep. Unreachable destinations are ``None`` in both
tables; no integer sentinel is used.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from swarmcov.channel import ChannelParams, link_up, sample_rss
from swarmcov.rng import GaussianStream


@dataclass(frozen=True)
class LinkGraph:
    node_count: int
    links: dict = field(default_factory=dict)  # (i, j) with i < j -> rss dBm

    def __post_init__(self):
        for i, j in self.links:
            if not (0 <= i < j < self.node_count):
                raise ValueError(f"bad link ({i}, {j})")

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.node_count)]
        for i, j in sorted(self.links):
            adj[i].append(j)
            adj[j].append(i)
        return adj

    @classmethod
    def from_pairs(cls, node_count: int, pairs, rss: float = 0.0) -> "LinkGraph":
        links = {}
        for i, j in pairs:
            if i == j:
                raise ValueError("self-loop")
            links[(min(i, j), max(i, j))] = rss
        return cls(node_count, links)


@dataclass(frozen=True)
class RoutingTables:
    hops: list  # hops[i][j]: int or None
    next_hop: list  # next_hop[i][j]: int or None

    @property
    def node_count(self) -> int:
        return len(self.hops)


def build_link_graph(positions, params: ChannelParams, rng: GaussianStream) -> LinkGraph:
    pts = np.asarray(positions, dtype=float).reshape(-1, 2)
    n = len(pts)
    if n < 1:
        raise ValueError("need at least one node")
    links = {}
    for i in range(n):
        for j in range(i + 1, n):
            rss = sample_rss(pts[i], pts[j], params, rng)
            if link_up(rss, params):
                links[(i, j)] = rss
    return LinkGraph(n, links)


def compute_routing_tables(graph: LinkGraph) -> RoutingTables:
    n = graph.node_count
    adj = graph.adjacency()
    hops: list[list[Optional[int]]] = []
    next_hop: list[list[Optional[int]]] = []
    for src in range(n):
        dist: list[Optional[int]] = [None] * n
        first: list[Optional[int]] = [None] * n
        dist[src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in adj[u]:  # ascending ids -> lowest-id next hop on ties
                if dist[v] is None:
                    dist[v] = dist[u] + 1
                    first[v] = v if u == src else first[u]
                    queue.append(v)
        hops.append(dist)
        next_hop.append(first)
    return RoutingTables(hops, next_hop)


def k_hop_neighborhood(tables: RoutingTables, i: int, k: int) -> set[int]:
    if k < 1:
        raise ValueError("k must be >= 1")
    return {j for j, h in enumerate(tables.hops[i]) if j != i and h is not None and h <= k}


def disk_neighborhood(positions, radius_m: float) -> list[set[int]]:
    if not radius_m > 0:
        raise ValueError("radius must be > 0")
    pts = np.asarray(positions, dtype=float).reshape(-1, 2)
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    n = len(pts)
    return [{j for j in range(n) if j != i and d[i, j] <= radius_m} for i in range(n)]


def is_connected(graph: LinkGraph) -> bool:
    if graph.node_count <= 1:
        return True
    tables = compute_routing_tables(graph)
    return all(h is not None for h in tables.hops[0])


def hop_stats(tables: RoutingTables) -> tuple[float, int]:
    """Mean finite hop count over reachable ordered pairs, and that pair count.

    Unreachable pairs are excluded, the same way infinite hops are dropped
    when plotting. Returns ``(nan, 0)`` when no pair is reachable.
    """
    finite = [h for i, row in enumerate(tables.hops) for j, h in enumerate(row) if i != j and h is not None]
    if not finite:
        return float("nan"), 0
    return float(np.mean(finite)), len(finite)


def connected_node_count(tables: RoutingTables) -> float:
    """Mean number of other nodes each node can reach."""
    n = tables.node_count
    reach = [sum(1 for j, h in enumerate(row) if j != i and h is not None) for i, row in enumerate(tables.hops)]
    return float(np.mean(reach)) if n else 0.0


def topology_trend(params: ChannelParams, seed: int, scales=range(1, 11), node_count: int = 10,
                   topologies: int = 100, base_side_m: float = 30.0) -> dict:
    """Connectivity and hop counts as a random deployment is stretched.

    For each scale ``s`` nodes are dropped uniformly in a square of side
    ``s * base_side_m``; returns per-scale means and standard errors of the
    per-node reachable count and of the mean finite hop count.
    """
    from swarmcov.rng import GaussianStream, INSTANCE, stream

    out = {"scale": [], "connected_mean": [], "connected_se": [], "hops_mean": [], "hops_se": []}
    for s in scales:
        gen = stream(seed, INSTANCE, int(s))
        reach, hops = [], []
        for _ in range(topologies):
            pos = gen.random((node_count, 2)) * base_side_m * s
            tables = compute_routing_tables(build_link_graph(pos, params, GaussianStream(gen)))
            reach.append(connected_node_count(tables))
            h, pairs = hop_stats(tables)
            if pairs:
                hops.append(h)
        out["scale"].append(s)
        out["connected_mean"].append(float(np.mean(reach)))
        out["connected_se"].append(float(np.std(reach, ddof=1) / np.sqrt(len(reach))))
        out["hops_mean"].append(float(np.mean(hops)) if hops else float("nan"))
        out["hops_se"].append(float(np.std(hops, ddof=1) / np.sqrt(len(hops))) if len(hops) > 1 else 0.0)
    return {k: np.asarray(v) for k, v in out.items()}
