"""Origin-rooted percolation marks on a Poisson sample in a finite window.

The window stands in for the infinite Poisson process with an extra point at
the origin.  Marks are trusted only on points farther than ``margin`` from
the window boundary.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import rng as _rng
from .excess import MergeTree, MuEstimate, _check_grid
from .generators import candidate_graph
from .graph import GraphError, Network, kruskal_mst


@dataclass(frozen=True, eq=False)
class RootedSample:
    d: int
    window: float
    points: np.ndarray  # row 0 is the origin
    seed: int

    @property
    def n_points(self) -> int:
        return int(self.points.shape[0]) - 1


def sample_rooted(d: int, window: float, seed: int) -> RootedSample:
    """Unit-intensity Poisson points in ``[-window, window]^d`` plus the origin.

    Points are drawn cell by cell on the unit grid, each cell from its own
    seed stream, then clipped to the window; a smaller window therefore sees
    exactly the restriction of a larger one.
    """
    if window <= 0:
        raise ValueError("window must be positive")
    reach = math.ceil(window)
    chunks = [np.zeros((1, d))]
    for cell in itertools.product(range(-reach, reach), repeat=d):
        g = _rng.generator(seed, "poisson-cell", *(c + 2**31 for c in cell))
        k = g.poisson(1.0)
        if k:
            chunks.append(np.asarray(cell, dtype=float) + g.random((k, d)))
    pts = np.concatenate(chunks)
    inside = np.all(np.abs(pts) <= window, axis=1)
    inside[0] = True
    pts = pts[inside]
    # the origin itself can only be hit with probability zero
    if np.any(np.all(pts[1:] == 0, axis=1)):
        raise GraphError("duplicate origin")
    return RootedSample(d, float(window), pts, seed)


def window_network(s: RootedSample, cutoff="auto") -> Network:
    shifted = s.points + s.window
    u, v, w, r, ok = candidate_graph(shifted, 2 * s.window, cutoff)
    meta = {"model": "poisson-window", "d": s.d, "n": s.points.shape[0], "seed": s.seed,
            "cutoff": r, "validated": ok, "coords": s.points}
    return Network(s.points.shape[0], u, v, w, meta)


def interior_mask(s: RootedSample, margin: float) -> np.ndarray:
    return np.max(np.abs(s.points), axis=1) < s.window - margin


@dataclass(frozen=True, eq=False)
class PercMarks:
    points: np.ndarray  # non-origin points
    length: np.ndarray
    perc: np.ndarray
    exc: np.ndarray
    interior: np.ndarray
    cutoff: float
    margin: float
    # every window edge with positive excess, weighted by its number of interior
    # endpoints, so each interior point can serve as a root
    edge_exc: np.ndarray = None
    edge_weight: np.ndarray = None
    n_interior: int = 0

    def rows(self):
        for p, ln, pc, ex, it in zip(self.points.tolist(), self.length.tolist(), self.perc.tolist(),
                                     self.exc.tolist(), self.interior.tolist()):
            yield (*p, ln, pc, ex, int(it))


def perc_marks(s: RootedSample, cutoff="auto", margin: float | None = None,
               net: Network | None = None) -> PercMarks:
    """``perc(O, x)`` for every sample point via merge times of the threshold graph."""
    if s.n_points == 0:
        empty = np.empty(0)
        return PercMarks(np.empty((0, s.d)), empty, empty, empty, np.empty(0, dtype=bool),
                         0.0, 0.0 if margin is None else margin, empty, empty,
                         int(s.window > (margin or 0.0)))
    net = net or window_network(s, cutoff)
    r = float(net.meta["cutoff"])
    margin = 2.0 * r if margin is None else float(margin)
    tree = MergeTree(net)
    others = np.arange(1, s.points.shape[0])
    perc = tree.perc(np.zeros_like(others), others)
    length = np.sqrt((s.points[1:] ** 2).sum(axis=1))
    # reuse the candidate-edge lengths so MST edges from O have exc exactly 0
    from_o = np.flatnonzero(net.u == 0)
    length[net.v[from_o] - 1] = net.length[from_o]
    exc = length - perc
    inner = interior_mask(s, margin)
    # a mark needs both the point and the origin away from the boundary
    interior = inner[1:] & bool(inner[0])

    edge_exc = net.length - tree.perc(net.u, net.v)
    weight = inner[net.u].astype(np.int64) + inner[net.v]
    keep = (edge_exc > 0) & (weight > 0)
    return PercMarks(s.points[1:], length, perc, exc, interior, r, margin,
                     edge_exc[keep], weight[keep], int(inner.sum()))


def mu_density_estimate(marks: list[PercMarks], x_grid, roots: str = "all") -> MuEstimate:
    """Replica average of ``#{points y: 0 < exc(root, y) < x}`` and its ratio to ``x``.

    ``roots="origin"`` counts the marks of the added origin only.  The default
    ``roots="all"`` averages the same count over every interior point of the
    window (each point of a stationary Poisson sample is a typical point),
    which has the same expectation and far less noise.
    """
    if not marks:
        raise ValueError("need at least one replica")
    if roots not in ("all", "origin"):
        raise ValueError(f"unknown roots {roots!r}")
    x = _check_grid(x_grid)
    counts = np.zeros((len(marks), x.size))
    for i, mk in enumerate(marks):
        if roots == "origin":
            pos = np.sort(mk.exc[mk.interior & (mk.exc > 0)])
            counts[i] = np.searchsorted(pos, x, side="left")
        elif mk.n_interior:
            order = np.argsort(mk.edge_exc)
            cum = np.concatenate([[0], np.cumsum(mk.edge_weight[order])])
            counts[i] = cum[np.searchsorted(mk.edge_exc[order], x, side="left")] / mk.n_interior
    mu = counts.mean(axis=0)
    if len(marks) > 1:
        se = counts.std(axis=0, ddof=1) / math.sqrt(len(marks))
    else:
        se = np.full(x.size, np.nan)
    return MuEstimate(x, mu, mu / x, float(len(marks)), mu_se=se, density_se=se / x)


def msf_window_diagnostic(s: RootedSample, cutoff="auto", margin: float | None = None,
                          net: Network | None = None) -> dict:
    """Compare the window MST with the edges whose length equals their merge-time perc.

    Disagreements are split into interior edges (both ends away from the
    boundary) and boundary edges, where the finite window is expected to
    differ from the infinite forest.
    """
    net = net or window_network(s, cutoff)
    r = float(net.meta["cutoff"])
    margin = 2.0 * r if margin is None else float(margin)
    if net.n_vertices == 1:
        return {"n_edges": 0, "interior_diff": [], "boundary_diff": [], "cutoff": r, "margin": margin}
    mst = kruskal_mst(net)
    tree = MergeTree(net)
    criterion = tree.perc(net.u, net.v) == net.length
    diff = np.flatnonzero(criterion != mst.in_tree)
    inner = interior_mask(s, margin)
    both = inner[net.u[diff]] & inner[net.v[diff]]
    return {
        "n_edges": net.n_edges,
        "n_tree_edges": int(mst.in_tree.sum()),
        "n_criterion_edges": int(criterion.sum()),
        "interior_diff": diff[both].tolist(),
        "boundary_diff": diff[~both].tolist(),
        "cutoff": r,
        "margin": margin,
    }
