"""Random instances: the disordered lattice and random Euclidean points."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from . import rng as _rng
from .graph import GraphError, Network

MAX_VERTICES = 2**31


@dataclass(frozen=True)
class Distribution:
    name: str
    sample: Callable[[np.random.Generator, int], np.ndarray]
    pdf: Callable[[np.ndarray], np.ndarray]
    cdf: Callable[[np.ndarray], np.ndarray]
    # int_x^{x+delta} (y - x) f(y) dy
    partial_moment: Callable[[float, float], float]
    density_bound: float
    # right end of the integration range (support end, or where 1 - F < 1e-12)
    x_max: float
    breakpoints: tuple = ()


def _uniform_moment(x, delta):
    hi = min(x + delta, 1.0)
    return 0.5 * (hi - x) ** 2 if hi > x else 0.0


def _exp_moment(x, delta):
    return math.exp(-x) * (1.0 - math.exp(-delta) * (1.0 + delta))


DISTRIBUTIONS = {
    "uniform01": Distribution(
        "uniform01",
        sample=lambda g, size: g.random(size),
        pdf=lambda x: np.where((x >= 0) & (x <= 1), 1.0, 0.0),
        cdf=lambda x: np.clip(x, 0.0, 1.0),
        partial_moment=_uniform_moment,
        density_bound=1.0,
        x_max=1.0,
    ),
    "exp1": Distribution(
        "exp1",
        sample=lambda g, size: g.standard_exponential(size),
        pdf=lambda x: np.where(x >= 0, np.exp(-np.maximum(x, 0.0)), 0.0),
        cdf=lambda x: np.where(x >= 0, -np.expm1(-np.maximum(x, 0.0)), 0.0),
        partial_moment=_exp_moment,
        density_bound=1.0,
        x_max=12.0 * math.log(10.0),
    ),
}


def get_distribution(dist: str) -> Distribution:
    try:
        return DISTRIBUTIONS[dist]
    except KeyError:
        raise GraphError(f"unknown distribution {dist!r}") from None


def dist_density_bound(dist: str) -> float:
    """Supremum of the edge-length density."""
    return get_distribution(dist).density_bound


@dataclass(frozen=True)
class LatticeSpec:
    d: int = 2
    m: int = 8
    dist: str = "uniform01"
    seed: int = 0

    @property
    def n(self) -> int:
        return self.m**self.d

    @property
    def n_edges(self) -> int:
        return self.d * self.m ** (self.d - 1) * (self.m - 1)


@dataclass(frozen=True)
class EuclideanSpec:
    d: int = 2
    n: int = 1000
    seed: int = 0
    cutoff: Union[str, float] = "auto"


def _distinct_draws(g: np.random.Generator, size: int, draw) -> np.ndarray:
    x = draw(g, size)
    while True:
        bad = x <= 0
        _, first = np.unique(x, return_index=True)
        dup = np.ones(size, dtype=bool)
        dup[first] = False
        bad |= dup
        if not bad.any():
            return x
        # redraw positions in index order; order is fixed so this stays deterministic
        x[bad] = draw(g, int(bad.sum()))


def lattice_edges(d: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Endpoints of the nearest-neighbour edges of the cube ``[0, m)^d``.

    Vertex ids are row-major; edges are grouped by axis (axis 0 first).
    """
    n = m**d
    ids = np.arange(n, dtype=np.int64)
    coords = np.stack(np.unravel_index(ids, (m,) * d), axis=1)
    us, vs = [], []
    for axis in range(d):
        stride = m ** (d - 1 - axis)
        src = ids[coords[:, axis] < m - 1]
        us.append(src)
        vs.append(src + stride)
    return np.concatenate(us), np.concatenate(vs)


def gen_lattice(spec: LatticeSpec) -> Network:
    if spec.d < 2 or spec.m < 2:
        raise GraphError("lattice needs d >= 2 and m >= 2")
    if spec.m**spec.d > MAX_VERTICES:
        raise GraphError("m**d overflows addressable size")
    dist = get_distribution(spec.dist)
    u, v = lattice_edges(spec.d, spec.m)
    g = _rng.generator(spec.seed, "lattice-lengths")
    length = _distinct_draws(g, u.size, dist.sample)
    meta = {"model": "lattice", "d": spec.d, "m": spec.m, "n": spec.n, "dist": spec.dist, "seed": spec.seed}
    return Network(spec.n, u, v, length, meta)


def radius_pairs(points: np.ndarray, r: float, side: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All pairs at distance ``<= r`` among points in ``[0, side]^d``.

    Grid bucketing with cells of side at least ``r``: each point is compared
    only with points in its own and adjacent cells.
    """
    n, d = points.shape
    ncell = max(1, int(side // r)) if r > 0 else 1
    width = side / ncell
    cell = np.clip((points / width).astype(np.int64), 0, ncell - 1)
    strides = ncell ** np.arange(d - 1, -1, -1)
    lin = cell @ strides
    order = np.argsort(lin, kind="stable")
    lin_sorted = lin[order]
    starts = np.searchsorted(lin_sorted, np.arange(ncell**d + 1))
    pts = points[order]
    cell_sorted = cell[order]

    out_i, out_j, out_len = [], [], []
    for off in itertools.product((-1, 0, 1), repeat=d):
        off = np.array(off)
        # half of the neighbour offsets, plus the cell itself
        nz = np.flatnonzero(off)
        if nz.size and off[nz[0]] < 0:
            continue
        nb = cell_sorted + off
        ok = np.all((nb >= 0) & (nb < ncell), axis=1)
        src = np.flatnonzero(ok)
        nb_lin = nb[ok] @ strides
        lo, hi = starts[nb_lin], starts[nb_lin + 1]
        if not nz.size:
            lo = np.maximum(lo, src + 1)
        cnt = np.maximum(hi - lo, 0)
        total = int(cnt.sum())
        if total == 0:
            continue
        i = np.repeat(src, cnt)
        j = np.repeat(lo - np.cumsum(cnt) + cnt, cnt) + np.arange(total)
        dist = np.sqrt(((pts[i] - pts[j]) ** 2).sum(axis=1))
        keep = dist <= r
        out_i.append(order[i[keep]])
        out_j.append(order[j[keep]])
        out_len.append(dist[keep])
    if not out_i:
        e = np.empty(0, dtype=np.int64)
        return e, e, np.empty(0)
    i, j, w = np.concatenate(out_i), np.concatenate(out_j), np.concatenate(out_len)
    a, b = np.minimum(i, j), np.maximum(i, j)
    key = np.lexsort((b, a))
    return a[key], b[key], w[key]


def bottleneck(n: int, u: np.ndarray, v: np.ndarray, length: np.ndarray) -> float:
    """Longest MST edge (the connection threshold), or ``inf`` if disconnected."""
    if n <= 1:
        return 0.0
    g = sparse.coo_matrix((length, (u, v)), shape=(n, n)).tocsr()
    n_comp, _ = csgraph.connected_components(g, directed=False)
    if n_comp > 1:
        return math.inf
    return float(csgraph.minimum_spanning_tree(g).data.max())


def auto_cutoff_start(n: int, d: int) -> float:
    return 2.0 * math.log(max(n, 2)) ** (1.0 / d)


def candidate_graph(points: np.ndarray, side: float, cutoff: Union[str, float] = "auto"):
    """Radius-pruned candidate edges plus the cutoff actually used.

    With ``cutoff="auto"`` the radius doubles until the candidate graph is
    connected and its longest MST edge is at most half the radius; that
    certifies the pruned MST equals the complete-graph MST and that every
    edge with excess below ``cutoff/2`` is present.
    """
    n, d = points.shape
    diameter = side * math.sqrt(d)
    if cutoff == "auto":
        r = auto_cutoff_start(n, d)
        while True:
            u, v, w = radius_pairs(points, r, side)
            top = bottleneck(n, u, v, w)
            if top <= r / 2 or r >= diameter:
                return u, v, w, r, True
            r *= 2.0
    r = float(cutoff)
    u, v, w = radius_pairs(points, r, side)
    top = bottleneck(n, u, v, w)
    if math.isinf(top):
        raise GraphError("cutoff too small")
    return u, v, w, r, bool(top <= r / 2 or r >= diameter)


def gen_euclidean(spec: EuclideanSpec) -> Network:
    if spec.n < 2 or spec.d < 2:
        raise GraphError("euclidean model needs n >= 2 and d >= 2")
    side = spec.n ** (1.0 / spec.d)
    g = _rng.generator(spec.seed, "euclidean-points")
    points = g.random((spec.n, spec.d)) * side
    return euclidean_network(points, side, spec.cutoff, seed=spec.seed)


def euclidean_network(points: np.ndarray, side: float, cutoff: Union[str, float] = "auto", seed=None) -> Network:
    points = np.asarray(points, dtype=float)
    n, d = points.shape
    u, v, w, r, ok = candidate_graph(points, side, cutoff)
    meta = {"model": "euclidean", "d": d, "n": n, "seed": seed, "cutoff": r, "validated": ok,
            "coords": points, "side": side}
    return Network(n, u, v, w, meta)
