"""s-t flow networks and an exact min-cut solver (Dinic's algorithm).

Capacities are real valued. Residual capacities at or below a small relative
tolerance are treated as saturated, so round-off never spawns extra phases.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import FrozenSet, List, Tuple

import numpy as np


class FlowNetwork:
    """Directed graph on ``n`` non-terminal nodes ``0..n-1`` plus a source and a sink.

    The source has index ``n`` and the sink ``n + 1``. Parallel edges are kept
    as separate arcs, which is equivalent to summing them.
    """

    def __init__(self, n: int):
        if n < 0:
            raise ValueError("node count must be non-negative")
        self.n = int(n)
        self.source = self.n
        self.sink = self.n + 1
        self.edges: List[Tuple[int, int, float]] = []

    @property
    def node_count(self) -> int:
        return self.n + 2

    def add_edge(self, u: int, v: int, capacity: float) -> None:
        capacity = float(capacity)
        if not np.isfinite(capacity) or capacity < 0:
            raise ValueError(f"capacity must be finite and non-negative, got {capacity}")
        for node in (u, v):
            if not 0 <= node < self.node_count:
                raise ValueError(f"node {node} out of range")
        if u == v:
            raise ValueError("self loops are not allowed")
        if v == self.source:
            raise ValueError("edges into the source are not allowed")
        if u == self.sink:
            raise ValueError("edges out of the sink are not allowed")
        if capacity > 0:
            self.edges.append((int(u), int(v), capacity))

    def cut_capacity(self, source_side) -> float:
        """Capacity crossing from ``source_side + {s}`` to its complement."""
        side = set(source_side) | {self.source}
        side.discard(self.sink)
        return float(sum(c for u, v, c in self.edges if u in side and v not in side))


@dataclass(frozen=True)
class CutResult:
    """Outcome of a min-cut solve.

    ``source_side`` is the minimal source set (nodes reachable from s in the
    residual graph); ``maximal_source_side`` is the largest one (every node that
    cannot reach t). Both induce minimum cuts.
    """

    cut_value: float
    source_side: FrozenSet[int]
    maximal_source_side: FrozenSet[int]
    flow_value: float
    edge_flows: np.ndarray = field(repr=False)


def solve_min_cut(g: FlowNetwork) -> CutResult:
    N = g.node_count
    s, t = g.source, g.sink
    m = len(g.edges)
    # arc 2e is edge e, arc 2e+1 its reverse
    head = np.empty(2 * m, dtype=np.int64)
    cap = [0.0] * (2 * m)
    adj: List[List[int]] = [[] for _ in range(N)]
    for e, (u, v, c) in enumerate(g.edges):
        head[2 * e], head[2 * e + 1] = v, u
        cap[2 * e] = c
        adj[u].append(2 * e)
        adj[v].append(2 * e + 1)
    to = head.tolist()
    max_cap = max((c for _, _, c in g.edges), default=0.0)
    eps = 1e-12 * max(1.0, max_cap)

    flow = 0.0
    while True:
        level = _bfs_levels(adj, to, cap, s, N, eps)
        if level[t] < 0:
            break
        ptr = [0] * N
        while True:
            pushed = _augment(adj, to, cap, level, ptr, s, t, eps)
            if pushed <= 0.0:
                break
            flow += pushed

    edge_flows = np.array([g.edges[e][2] - cap[2 * e] for e in range(m)])
    reach_s = _bfs_levels(adj, to, cap, s, N, eps)
    source_side = frozenset(v for v in range(g.n) if reach_s[v] >= 0)
    reaches_t = _reverse_reach(adj, to, cap, t, N, eps)
    maximal = frozenset(v for v in range(g.n) if not reaches_t[v])
    return CutResult(
        cut_value=g.cut_capacity(source_side),
        source_side=source_side,
        maximal_source_side=maximal,
        flow_value=flow,
        edge_flows=edge_flows,
    )


def _bfs_levels(adj, to, cap, s, N, eps) -> List[int]:
    level = [-1] * N
    level[s] = 0
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for a in adj[u]:
            v = to[a]
            if level[v] < 0 and cap[a] > eps:
                level[v] = level[u] + 1
                queue.append(v)
    return level


def _reverse_reach(adj, to, cap, t, N, eps) -> List[bool]:
    # u reaches t iff some arc u->v has residual and v reaches t; arc a^1 is the
    # reverse of a, so scan arcs entering v through their reverses
    seen = [False] * N
    seen[t] = True
    queue = deque([t])
    while queue:
        v = queue.popleft()
        for rev in adj[v]:
            a = rev ^ 1
            u = to[rev]
            if not seen[u] and cap[a] > eps:
                seen[u] = True
                queue.append(u)
    return seen


def _augment(adj, to, cap, level, ptr, s, t, eps) -> float:
    """Find one augmenting path in the level graph and push its bottleneck."""
    path: List[int] = []
    u = s
    while True:
        if u == t:
            bottleneck = min(cap[a] for a in path)
            for a in path:
                cap[a] -= bottleneck
                cap[a ^ 1] += bottleneck
            return bottleneck
        arcs = adj[u]
        advanced = False
        while ptr[u] < len(arcs):
            a = arcs[ptr[u]]
            v = to[a]
            if cap[a] > eps and level[v] == level[u] + 1:
                path.append(a)
                u = v
                advanced = True
                break
            ptr[u] += 1
        if not advanced:
            if u == s:
                return 0.0
            # dead end: retreat and skip the arc that led here
            level[u] = -1
            a = path.pop()
            u = to[a ^ 1]
            ptr[u] += 1
