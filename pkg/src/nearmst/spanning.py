"""Brute-force spanning-tree enumeration for tiny networks.

This is the oracle side of the near-MST bracket: everything here is
exponential and guarded by size limits.
"""
from __future__ import annotations

import math

import numpy as np

from .graph import DisjointSet, GraphError, MstResult, Network, kruskal_mst

MAX_VERTICES = 12
MAX_EDGES = 20
MAX_TREES = 10**6


def matrix_tree_count(net: Network) -> int:
    """Number of spanning trees: exact determinant of a reduced Laplacian (Bareiss)."""
    n = net.n_vertices
    if n <= 1:
        return 1
    lap = [[0] * n for _ in range(n)]
    for a, b in zip(net.u.tolist(), net.v.tolist()):
        lap[a][a] += 1
        lap[b][b] += 1
        lap[a][b] -= 1
        lap[b][a] -= 1
    m = [row[1:] for row in lap[1:]]
    size = n - 1
    sign, prev = 1, 1
    for k in range(size - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, size) if m[r][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[size - 1][size - 1]


def enumerate_spanning_trees(net: Network):
    """Yield every spanning tree as a tuple of edge ids (include/exclude recursion).

    An edge is excluded only if the remaining graph stays connected (it is
    not a bridge) and included only if it closes no cycle, so every leaf of
    the recursion is a spanning tree.
    """
    n, m = net.n_vertices, net.n_edges
    us, vs = net.u.tolist(), net.v.tolist()
    if n == 1:
        yield ()
        return

    def connected(alive):
        dsu = DisjointSet(n)
        for e in range(m):
            if alive[e]:
                dsu.union(us[e], vs[e])
        return dsu.n_components == 1

    def acyclic_with(chosen, e):
        dsu = DisjointSet(n)
        for f in chosen:
            dsu.union(us[f], vs[f])
        return dsu.find(us[e]) != dsu.find(vs[e])

    alive = [True] * m
    if not connected(alive):
        raise GraphError("not connected")
    chosen: list[int] = []

    def rec(i):
        if len(chosen) == n - 1:
            yield tuple(chosen)
            return
        if i == m:
            return
        if acyclic_with(chosen, i):
            chosen.append(i)
            yield from rec(i + 1)
            chosen.pop()
        alive[i] = False
        if connected(alive):
            yield from rec(i + 1)
        alive[i] = True

    yield from rec(0)


def _guard(net: Network) -> None:
    if not (net.n_vertices <= MAX_VERTICES or net.n_edges <= MAX_EDGES):
        raise GraphError("instance too large")
    if matrix_tree_count(net) > MAX_TREES:
        raise GraphError("instance too large")


def exact_profile(net: Network, mst: MstResult | None = None) -> np.ndarray:
    """``best[j]`` = least extra length over trees with exactly ``j`` non-MST edges."""
    _guard(net)
    mst = mst or kruskal_mst(net)
    length = net.length.tolist()
    tree = mst.tree_edges
    best = [math.inf] * net.n_vertices
    for t in enumerate_spanning_trees(net):
        diff = sum(1 for e in t if e not in tree)
        extra = math.fsum(length[e] for e in t) - mst.total_len
        if diff == 0:
            extra = 0.0
        if extra < best[diff]:
            best[diff] = extra
    return np.array(best)


def exact_epsilon(net: Network, k: int, mst: MstResult | None = None) -> float:
    """Least ``(len(T') - len(T)) / n`` over spanning trees with ``|T' \\ T| >= k``."""
    if k == 0:
        return 0.0
    best = exact_profile(net, mst)
    if k >= best.size or not np.isfinite(best[k:]).any():
        raise GraphError("k infeasible")
    return float(best[k:].min()) / net.n_vertices


def excess_gap_violations(net: Network, exc: np.ndarray, mst: MstResult | None = None,
                         tol: float = 1e-12) -> int:
    """Trees whose extra length falls below the summed excess of their new edges."""
    _guard(net)
    mst = mst or kruskal_mst(net)
    length = net.length.tolist()
    tree = mst.tree_edges
    bad = 0
    for t in enumerate_spanning_trees(net):
        extra = math.fsum(length[e] for e in t) - mst.total_len
        bound = math.fsum(float(exc[e]) for e in t if e not in tree)
        if extra < bound - tol * max(1.0, mst.total_len):
            bad += 1
    return bad

