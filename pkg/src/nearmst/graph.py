"""Edge-list networks, union-find, Kruskal MST and threshold components.

Edge ids are dense integers: edge ``i`` is ``(net.u[i], net.v[i])`` with
length ``net.length[i]``.  Every downstream table is an array indexed by
edge id.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np


class GraphError(ValueError):
    """Raised when a network violates a precondition (ties, disconnection, ...)."""


@dataclass(frozen=True, eq=False)
class Network:
    n_vertices: int
    u: np.ndarray
    v: np.ndarray
    length: np.ndarray
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        u = np.ascontiguousarray(self.u, dtype=np.int64)
        v = np.ascontiguousarray(self.v, dtype=np.int64)
        length = np.ascontiguousarray(self.length, dtype=np.float64)
        if not (u.shape == v.shape == length.shape) or u.ndim != 1:
            raise GraphError("u, v, length must be 1-d arrays of equal size")
        if u.size:
            if u.min() < 0 or v.min() < 0 or max(u.max(), v.max()) >= self.n_vertices:
                raise GraphError("vertex id out of range")
            if np.any(u == v):
                raise GraphError("self loop")
            if not np.all(length > 0):
                raise GraphError("non-positive length")
            lo, hi = np.minimum(u, v), np.maximum(u, v)
            if np.unique(lo * self.n_vertices + hi).size != u.size:
                raise GraphError("duplicate edge")
        for name, arr in (("u", u), ("v", v), ("length", length)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_edges(cls, n_vertices: int, edges: Iterable[tuple[int, int, float]], meta=None) -> "Network":
        edges = list(edges)
        if edges:
            u, v, w = (np.array(c) for c in zip(*edges))
        else:
            u = v = np.empty(0, dtype=np.int64)
            w = np.empty(0)
        return cls(n_vertices, u, v, w, dict(meta or {}))

    @property
    def n_edges(self) -> int:
        return int(self.u.size)

    def has_distinct_lengths(self) -> bool:
        return np.unique(self.length).size == self.length.size

    def is_connected(self) -> bool:
        return self.n_vertices <= 1 or np.unique(components_at(self, np.inf)).size == 1

    def edge_index(self) -> dict[tuple[int, int], int]:
        """Map unordered vertex pair -> edge id."""
        return {
            (min(a, b), max(a, b)): i
            for i, (a, b) in enumerate(zip(self.u.tolist(), self.v.tolist()))
        }


class DisjointSet:
    """Union-find with union by size and path halving.

    Successful unions are appended to ``merges`` as ``(edge_id, time)`` so the
    evolution of the threshold graph can be replayed.
    """

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.n_components = n
        self.merges: list[tuple[int, float]] = []

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int, edge_id: int = -1, time: float = 0.0) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.n_components -= 1
        self.merges.append((edge_id, time))
        return True

    def labels(self) -> np.ndarray:
        """Component label per element: the smallest element of its component."""
        n = len(self.parent)
        roots = np.fromiter((self.find(i) for i in range(n)), dtype=np.int64, count=n)
        first = np.full(n, n, dtype=np.int64)
        np.minimum.at(first, roots, np.arange(n))
        return first[roots]


class TreeIndex:
    """Rooted spanning tree with ancestor-jump tables carrying path maxima.

    ``up[j][x]`` is the ``2**j``-th ancestor of ``x``; ``jump_len[j][x]`` and
    ``jump_edge[j][x]`` hold the longest edge on that jump.  The root points
    to itself with length ``-inf``.
    """

    def __init__(self, n: int, tree_u: np.ndarray, tree_v: np.ndarray, tree_eid: np.ndarray,
                 lengths: np.ndarray, root: int = 0):
        self.n = n
        self.root = root
        parent = np.full(n, -1, dtype=np.int64)
        parent_edge = np.full(n, -1, dtype=np.int64)
        depth = np.zeros(n, dtype=np.int64)

        # CSR adjacency of the tree
        ends = np.concatenate([tree_u, tree_v])
        other = np.concatenate([tree_v, tree_u])
        eids = np.concatenate([tree_eid, tree_eid])
        perm = np.argsort(ends, kind="stable")
        nbr, nbr_e = other[perm].tolist(), eids[perm].tolist()
        start = np.searchsorted(ends[perm], np.arange(n + 1)).tolist()

        parent_l, pe_l, depth_l = parent.tolist(), parent_edge.tolist(), depth.tolist()
        parent_l[root] = root
        order_l = [root]
        head = 0
        while head < len(order_l):
            x = order_l[head]
            head += 1
            dx = depth_l[x] + 1
            for k in range(start[x], start[x + 1]):
                y = nbr[k]
                if parent_l[y] == -1:
                    parent_l[y] = x
                    pe_l[y] = nbr_e[k]
                    depth_l[y] = dx
                    order_l.append(y)
        if len(order_l) != n:
            raise GraphError("not connected")
        self.parent = np.array(parent_l, dtype=np.int64)
        self.parent_edge = np.array(pe_l, dtype=np.int64)
        self.depth = np.array(depth_l, dtype=np.int64)
        self.order = np.array(order_l, dtype=np.int64)

        plen = np.where(self.parent_edge >= 0, lengths[np.maximum(self.parent_edge, 0)], -np.inf)
        levels = max(1, int(self.depth.max()).bit_length())
        up = [self.parent]
        jl = [plen]
        je = [self.parent_edge]
        for _ in range(1, levels):
            prev_up, prev_l, prev_e = up[-1], jl[-1], je[-1]
            nxt = prev_up[prev_up]
            cand_l = prev_l[prev_up]
            take = cand_l > prev_l
            up.append(nxt)
            jl.append(np.where(take, cand_l, prev_l))
            je.append(np.where(take, prev_e[prev_up], prev_e))
        self.up = np.stack(up)
        self.jump_len = np.stack(jl)
        self.jump_edge = np.stack(je)

    def path_max(self, a, b) -> tuple[np.ndarray, np.ndarray]:
        """Vectorised longest tree edge between vertex arrays ``a`` and ``b``.

        Returns ``(length, edge_id)``; pairs with ``a == b`` give ``(-inf, -1)``.
        """
        a = np.array(a, dtype=np.int64, ndmin=1)
        b = np.array(b, dtype=np.int64, ndmin=1)
        swap = self.depth[a] < self.depth[b]
        a, b = np.where(swap, b, a), np.where(swap, a, b)
        best = np.full(a.shape, -np.inf)
        best_e = np.full(a.shape, -1, dtype=np.int64)

        def absorb(mask, lens, edges):
            take = mask & (lens > best)
            best[take] = lens[take]
            best_e[take] = edges[take]

        diff = self.depth[a] - self.depth[b]
        for j in range(self.up.shape[0]):
            bit = ((diff >> j) & 1).astype(bool)
            if bit.any():
                absorb(bit, self.jump_len[j][a], self.jump_edge[j][a])
                a = np.where(bit, self.up[j][a], a)
        for j in range(self.up.shape[0] - 1, -1, -1):
            ua, ub = self.up[j][a], self.up[j][b]
            move = ua != ub
            if move.any():
                absorb(move, self.jump_len[j][a], self.jump_edge[j][a])
                absorb(move, self.jump_len[j][b], self.jump_edge[j][b])
                a = np.where(move, ua, a)
                b = np.where(move, ub, b)
        last = a != b
        absorb(last, self.jump_len[0][a], self.jump_edge[0][a])
        absorb(last, self.jump_len[0][b], self.jump_edge[0][b])
        return best, best_e


@dataclass(frozen=True, eq=False)
class MstResult:
    tree_edges: frozenset
    total_len: float
    in_tree: np.ndarray
    index: TreeIndex

    @property
    def edge_ids(self) -> np.ndarray:
        return np.flatnonzero(self.in_tree)


def kruskal_mst(net: Network, root: int = 0) -> MstResult:
    """Unique MST of a connected network with distinct edge lengths."""
    order = np.argsort(net.length, kind="stable")
    if np.any(np.diff(net.length[order]) == 0):
        raise GraphError("tied lengths")
    n = net.n_vertices
    # inlined union-find (size + path halving): this loop dominates large instances
    parent = list(range(n))
    size = [1] * n
    chosen = []
    need = n - 1
    for eid, a, b in zip(order.tolist(), net.u[order].tolist(), net.v[order].tolist()):
        if len(chosen) == need:
            break
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a == b:
            continue
        if size[a] < size[b]:
            a, b = b, a
        parent[b] = a
        size[a] += size[b]
        chosen.append(eid)
    if len(chosen) != n - 1:
        raise GraphError("not connected")
    chosen = np.array(sorted(chosen), dtype=np.int64)
    in_tree = np.zeros(net.n_edges, dtype=bool)
    in_tree[chosen] = True
    in_tree.setflags(write=False)
    index = TreeIndex(n, net.u[chosen], net.v[chosen], chosen, net.length, root=root)
    return MstResult(frozenset(chosen.tolist()), float(net.length[chosen].sum()), in_tree, index)


def components_at(net: Network, t: float) -> np.ndarray:
    """Component labels of the threshold graph keeping edges with ``len < t``.

    The inequality is strict.  With distinct lengths the boundary convention
    does not change any percolation value.
    """
    if t < 0:
        raise GraphError("threshold must be non-negative")
    dsu = DisjointSet(net.n_vertices)
    keep = np.flatnonzero(net.length < t)
    for a, b in zip(net.u[keep].tolist(), net.v[keep].tolist()):
        dsu.union(a, b)
    return dsu.labels()


def is_spanning_tree(net: Network, edge_ids) -> bool:
    ids = sorted(set(int(e) for e in edge_ids))
    if len(ids) != net.n_vertices - 1:
        return False
    dsu = DisjointSet(net.n_vertices)
    for e in ids:
        if not dsu.union(int(net.u[e]), int(net.v[e])):
            return False
    return dsu.n_components == 1
