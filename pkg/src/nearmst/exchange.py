"""Bracketing the near-minimal-tree cost ``eps_n(delta)``.

Lower bound: the sum of the ``k`` smallest positive excesses (any tree with
``k`` new edges pays at least their excesses).  Upper bound: explicit
spanning trees built from the MST by single-edge exchanges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .excess import ExcessTable
from .graph import GraphError, MstResult, Network
from . import spanning

STRATEGIES = ("disjoint", "sequential")


class InsufficientCandidates(GraphError):
    pass


@dataclass
class SwapPlan:
    swaps: list[tuple[int, int, float]] = field(default_factory=list)

    @property
    def total_cost(self) -> float:
        return math.fsum(c for _, _, c in self.swaps)

    @property
    def added(self) -> list[int]:
        return [a for a, _, _ in self.swaps]

    @property
    def removed(self) -> list[int]:
        return [r for _, r, _ in self.swaps]

    def __len__(self):
        return len(self.swaps)

    def prefix(self, k: int) -> "SwapPlan":
        return SwapPlan(self.swaps[:k])

    def apply(self, mst: MstResult) -> set[int]:
        tree = set(mst.tree_edges)
        for a, r, _ in self.swaps:
            tree.discard(r)
            tree.add(a)
        return tree


@dataclass(frozen=True)
class CurveRow:
    k: int
    delta: float
    lb: float
    ub: float
    exact: float | None
    ub_tree_diff: int
    strategy: str
    lb_trusted: bool = True


@dataclass
class EpsilonCurve:
    rows: list[CurveRow] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)


def k_for_delta(delta: float, n: int) -> int:
    """Smallest integer ``k >= delta * n``, with ``delta`` read as the decimal it prints as."""
    return math.ceil(Fraction(repr(float(delta))) * n)


def epsilon_lower_bound(tbl: ExcessTable, k: int) -> float:
    if k == 0:
        return 0.0
    pos = tbl.positive_excesses()
    if k > pos.size:
        raise InsufficientCandidates("insufficient candidates")
    return math.fsum(pos[:k].tolist()) / tbl.n_vertices


def lower_bound_trusted(tbl: ExcessTable, k: int) -> bool:
    """False when the ``k``-th smallest excess lies beyond the trusted (unpruned) range."""
    if k == 0:
        return True
    pos = tbl.positive_excesses()
    return bool(k <= pos.size and pos[k - 1] <= tbl.trusted_upto)


def _candidates(tbl: ExcessTable) -> np.ndarray:
    nontree = np.flatnonzero(~tbl.in_mst & (tbl.exc > 0))
    return nontree[np.lexsort((nontree, tbl.exc[nontree]))]


def _disjoint_plan(tbl: ExcessTable, k: int) -> SwapPlan:
    plan = SwapPlan()
    removed = set()
    cme, exc = tbl.cycle_max_edge, tbl.exc
    for e in _candidates(tbl).tolist():
        r = int(cme[e])
        if r in removed:
            continue
        removed.add(r)
        plan.swaps.append((e, r, float(exc[e])))
        if len(plan) == k:
            break
    return plan


def _sequential_plan(net: Network, mst: MstResult, tbl: ExcessTable, k: int) -> SwapPlan:
    idx = mst.index
    parent = idx.parent.tolist()
    pe = idx.parent_edge.tolist()
    root = idx.root
    length = net.length.tolist()
    original = mst.in_tree.tolist()
    us, vs = net.u.tolist(), net.v.tolist()
    mark_a = [0] * net.n_vertices
    mark_b = [0] * net.n_vertices
    plan = SwapPlan()

    for stamp, f in enumerate(_candidates(tbl).tolist(), start=1):
        a, b = us[f], vs[f]
        # climb from both ends alternately until the walks meet
        side_a, side_b = [a], [b]
        mark_a[a] = stamp
        mark_b[b] = stamp
        x, y = a, b
        meet = a if mark_b[a] == stamp else (b if mark_a[b] == stamp else -1)
        while meet < 0:
            if x != root:
                x = parent[x]
                side_a.append(x)
                mark_a[x] = stamp
                if mark_b[x] == stamp:
                    meet = x
                    break
            if y != root:
                y = parent[y]
                side_b.append(y)
                mark_b[y] = stamp
                if mark_a[y] == stamp:
                    meet = y
                    break
        side_a = side_a[: side_a.index(meet)]
        side_b = side_b[: side_b.index(meet)]

        best, best_side, best_pos = -math.inf, None, -1
        for side in (side_a, side_b):
            for pos, node in enumerate(side):
                e = pe[node]
                if original[e] and length[e] > best:
                    best, best_side, best_pos = length[e], side, pos
        if best_side is None:
            continue
        r = pe[best_side[best_pos]]
        # detach the subtree below r and re-hang it from the new edge f
        chain = best_side[: best_pos + 1]
        start, other = (a, b) if best_side is side_a else (b, a)
        old_pe = [pe[node] for node in chain]
        for j in range(len(chain) - 1, 0, -1):
            parent[chain[j]] = chain[j - 1]
            pe[chain[j]] = old_pe[j - 1]
        parent[start] = other
        pe[start] = f
        original[r] = False
        plan.swaps.append((f, r, length[f] - length[r]))
        if len(plan) == k:
            break
    return plan


def greedy_plan(net: Network, mst: MstResult, tbl: ExcessTable, k: int, strategy: str) -> SwapPlan:
    """Up to ``k`` exchanges; may stop short when candidates run out."""
    if strategy == "disjoint":
        return _disjoint_plan(tbl, k)
    if strategy == "sequential":
        return _sequential_plan(net, mst, tbl, k)
    raise ValueError(f"unknown strategy {strategy!r}")


def greedy_exchange(net: Network, mst: MstResult, tbl: ExcessTable, k: int,
                    strategy: str = "disjoint") -> tuple[SwapPlan, CurveRow]:
    if k < 1:
        raise ValueError("k must be >= 1")
    plan = greedy_plan(net, mst, tbl, k, strategy)
    if len(plan) < k:
        raise InsufficientCandidates("exhausted candidates before k swaps")
    n = net.n_vertices
    lb = epsilon_lower_bound(tbl, k)
    row = CurveRow(k, k / n, lb, plan.total_cost / n, None, k, strategy, lower_bound_trusted(tbl, k))
    return plan, row


def _best_upper(costs: dict[str, np.ndarray], k: int):
    """Cheapest prefix with at least ``k`` swaps over all strategies."""
    best = (math.inf, -1, "")
    for name, cum in costs.items():
        if cum.size <= k:
            continue
        j = k + int(np.argmin(cum[k:]))
        if cum[j] < best[0]:
            best = (float(cum[j]), j, name)
    return best


def epsilon_curve(net: Network, mst: MstResult, tbl: ExcessTable, deltas,
                  strategies=STRATEGIES, exact: str | bool = "auto") -> EpsilonCurve:
    deltas = [float(x) for x in deltas]
    if any(not 0 < x < 1 for x in deltas) or any(b <= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("deltas must be increasing and inside (0, 1)")
    n = net.n_vertices
    ks = [k_for_delta(x, n) for x in deltas]
    k_max = max(ks)
    costs = {}
    for name in strategies:
        plan = greedy_plan(net, mst, tbl, k_max, name)
        costs[name] = np.concatenate([[0.0], np.cumsum([c for _, _, c in plan.swaps])])

    profile = None
    want_exact = exact is True or (exact == "auto" and (n <= spanning.MAX_VERTICES or
                                                         net.n_edges <= spanning.MAX_EDGES))
    if want_exact:
        try:
            profile = spanning.exact_profile(net, mst)
        except GraphError:
            if exact is True:
                raise

    curve = EpsilonCurve()
    for delta, k in zip(deltas, ks):
        lb = epsilon_lower_bound(tbl, k)
        cost, diff, name = _best_upper(costs, k)
        if diff < 0:
            raise InsufficientCandidates("exhausted candidates before k swaps")
        ex = None
        if profile is not None and k < profile.size and np.isfinite(profile[k:]).any():
            ex = float(profile[k:].min()) / n
        curve.rows.append(CurveRow(k, delta, lb, cost / n, ex, diff, name, lower_bound_trusted(tbl, k)))
    return curve
