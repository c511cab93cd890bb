"""Percolation values, excesses and the empirical excess measure."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import DisjointSet, GraphError, MstResult, Network


def path_max(mst: MstResult, u: int, v: int) -> tuple[int, float]:
    """Longest edge on the MST path between ``u`` and ``v`` as ``(edge_id, len)``."""
    if u == v:
        raise GraphError("degenerate query")
    length, edge = mst.index.path_max([u], [v])
    return int(edge[0]), float(length[0])


@dataclass(frozen=True, eq=False)
class ExcessTable:
    u: np.ndarray
    v: np.ndarray
    length: np.ndarray
    perc: np.ndarray
    exc: np.ndarray
    in_mst: np.ndarray
    cycle_max_edge: np.ndarray
    n_vertices: int
    # excesses above this are not trustworthy (pruned candidate graphs)
    trusted_upto: float = math.inf

    @property
    def n_edges(self) -> int:
        return int(self.length.size)

    def positive_excesses(self) -> np.ndarray:
        """Sorted strictly positive excesses, one per non-tree edge."""
        x = self.exc[~self.in_mst]
        return np.sort(x[x > 0])

    def rows(self):
        for i in range(self.n_edges):
            yield (i, int(self.u[i]), int(self.v[i]), float(self.length[i]), float(self.perc[i]),
                   float(self.exc[i]), int(self.in_mst[i]))


def trusted_range(net: Network) -> float:
    if net.meta.get("model") == "euclidean" and net.meta.get("cutoff") is not None:
        return float(net.meta["cutoff"]) / 2.0
    return math.inf


def excess_table(net: Network, mst: MstResult) -> ExcessTable:
    perc, edge = mst.index.path_max(net.u, net.v)
    tree = mst.in_tree
    perc = np.where(tree, net.length, perc)
    edge = np.where(tree, np.arange(net.n_edges), edge)
    # exact zero on tree edges; float subtraction elsewhere is exact enough (len > perc)
    exc = np.where(tree, 0.0, net.length - perc)
    return ExcessTable(net.u, net.v, net.length, perc, exc, tree.copy(), edge, net.n_vertices,
                       trusted_range(net))


def excluded_perc(net: Network, mst: MstResult, e: int) -> float:
    """Connection threshold of ``e``'s endpoints once ``e`` itself is deleted.

    For a non-tree edge this is its percolation value.  For a tree edge it is
    the shortest non-tree edge crossing the cut obtained by deleting ``e``
    from the MST (the replacement edge).
    """
    if not mst.in_tree[e]:
        return path_max(mst, int(net.u[e]), int(net.v[e]))[1]
    idx = mst.index
    a, b = int(net.u[e]), int(net.v[e])
    child = a if idx.parent[a] == b and idx.parent_edge[a] == e else b
    inside = subtree_mask(mst, child)
    crossing = (inside[net.u] != inside[net.v]) & ~mst.in_tree
    if not crossing.any():
        raise GraphError("bridge edge")
    return float(net.length[crossing].min())


def subtree_mask(mst: MstResult, root: int) -> np.ndarray:
    idx = mst.index
    mask = np.zeros(idx.n, dtype=bool)
    mask[root] = True
    # BFS order guarantees parents are visited before children
    pos = np.empty(idx.n, dtype=np.int64)
    pos[idx.order] = np.arange(idx.n)
    for x in idx.order[pos[root] + 1:].tolist():
        if mask[idx.parent[x]]:
            mask[x] = True
    return mask


def replacement_lengths(net: Network, mst: MstResult) -> np.ndarray:
    """Excluded-edge value for every edge at once.

    Non-tree edges are scanned by increasing length; each one covers the
    still-uncovered tree edges on its path, found by jumping over covered
    stretches with a union-find.  Uncovered tree edges (bridges) get ``inf``.
    """
    idx = mst.index
    tbl_perc, _ = idx.path_max(net.u, net.v)
    out = np.where(mst.in_tree, np.inf, tbl_perc)
    parent = idx.parent.tolist()
    depth = idx.depth.tolist()
    pe = idx.parent_edge.tolist()
    # jump[x]: nearest ancestor-or-self whose parent edge is still uncovered
    jump = list(range(idx.n))

    def top(x):
        while jump[x] != x:
            jump[x] = jump[jump[x]]
            x = jump[x]
        return x

    cover = out.copy()
    for e in np.argsort(net.length, kind="stable").tolist():
        if mst.in_tree[e]:
            continue
        a, b = top(int(net.u[e])), top(int(net.v[e]))
        w = float(net.length[e])
        while a != b:
            if depth[a] < depth[b]:
                a, b = b, a
            cover[pe[a]] = w
            jump[a] = parent[a]
            a = top(a)
    return np.where(mst.in_tree, cover, out)


class MergeTree:
    """Kruskal reconstruction tree answering ``perc(u, v)`` queries.

    Leaves are the vertices; internal node ``n + i`` is the ``i``-th merge of
    the threshold-graph evolution and carries the merging edge length.  The
    lowest common ancestor of two leaves is the largest node id in the Euler
    tour between their first occurrences (ids grow with merge time), which a
    sparse table answers in O(1).
    """

    def __init__(self, net: Network):
        n = net.n_vertices
        self.n = n
        order = np.argsort(net.length, kind="stable")
        dsu = DisjointSet(n)
        top = list(range(n))
        children: list[tuple[int, int]] = []
        values: list[float] = []
        merge_edges: list[int] = []
        for e, a, b, w in zip(order.tolist(), net.u[order].tolist(), net.v[order].tolist(),
                              net.length[order].tolist()):
            ra, rb = dsu.find(a), dsu.find(b)
            if ra == rb:
                continue
            node = n + len(values)
            children.append((top[ra], top[rb]))
            values.append(w)
            merge_edges.append(e)
            dsu.union(ra, rb)
            top[dsu.find(ra)] = node
            if len(values) == n - 1:
                break
        if len(values) != n - 1:
            raise GraphError("not connected")
        self.value = np.concatenate([np.full(n, -np.inf), np.array(values)])
        self.merge_edge = np.array(merge_edges, dtype=np.int64)

        root = 2 * n - 2
        first = [0] * (2 * n - 1)
        euler: list[int] = []
        stack = [(root, 0)]
        while stack:
            node, state = stack.pop()
            if state == 0:
                first[node] = len(euler)
            euler.append(node)
            if node >= n and state < 2:
                stack.append((node, state + 1))
                stack.append((children[node - n][state], 0))
        self.first = np.array(first, dtype=np.int64)
        tour = np.array(euler, dtype=np.int64)
        table = [tour]
        span = 1
        while 2 * span <= tour.size:
            prev = table[-1]
            table.append(np.maximum(prev[:-span], prev[span:]))
            span *= 2
        self.table = table

    def lca(self, a, b) -> np.ndarray:
        lo = np.minimum(self.first[a], self.first[b])
        hi = np.maximum(self.first[a], self.first[b])
        k = np.floor(np.log2(hi - lo + 1)).astype(np.int64)
        out = np.empty(lo.shape, dtype=np.int64)
        for j in np.unique(k).tolist():
            sel = k == j
            row = self.table[j]
            out[sel] = np.maximum(row[lo[sel]], row[hi[sel] - (1 << j) + 1])
        return out

    def perc(self, a, b) -> np.ndarray:
        """Vectorised ``perc(a, b)``; zero where ``a == b``."""
        a = np.array(a, dtype=np.int64, ndmin=1)
        b = np.array(b, dtype=np.int64, ndmin=1)
        if self.n == 1:
            return np.zeros(a.shape)
        val = self.value[self.lca(a, b)]
        return np.where(a == b, 0.0, val)


def perc_all_pairs(net: Network) -> MergeTree:
    return MergeTree(net)


@dataclass(frozen=True, eq=False)
class MuEstimate:
    x_grid: np.ndarray
    mu_hat: np.ndarray
    density_hat: np.ndarray
    n: float
    trusted_upto: float = math.inf
    # standard errors across replicas, when the estimate is a replica average
    mu_se: np.ndarray | None = None
    density_se: np.ndarray | None = None

    @property
    def trusted(self) -> np.ndarray:
        return self.x_grid <= self.trusted_upto

    def rows(self):
        for x, m, dh, t in zip(self.x_grid.tolist(), self.mu_hat.tolist(), self.density_hat.tolist(),
                               self.trusted.tolist()):
            yield x, m, dh, int(t)


def _check_grid(x_grid) -> np.ndarray:
    x = np.asarray(x_grid, dtype=float)
    if x.ndim != 1 or x.size == 0 or np.any(x <= 0) or np.any(np.diff(x) <= 0):
        raise ValueError("x_grid must be strictly increasing and positive")
    return x


def empirical_mu(tbl: ExcessTable, x_grid) -> MuEstimate:
    """``(1/n) #{edges: 0 < exc < x}`` at each grid point, and its ratio to ``x``."""
    x = _check_grid(x_grid)
    pos = tbl.positive_excesses()
    counts = np.searchsorted(pos, x, side="left")
    mu = counts / tbl.n_vertices
    return MuEstimate(x, mu, mu / x, float(tbl.n_vertices), tbl.trusted_upto)
