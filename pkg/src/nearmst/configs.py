"""Counting the special local configurations that allow one cheap exchange.

Lattice (d = 2): the vertex square is cut into disjoint 3x3 blocks.  In block
``(I, J)`` the 4-cycle sits on rows and columns ``3I+1, 3I+2`` and
``3J+1, 3J+2``; with rows as the vertical axis, ``a`` is the left vertical
edge, ``c`` the right one, ``d`` the bottom horizontal edge and ``b`` the top
one.  The eight other edges touching the cycle reach rows/columns ``3I`` and
``3I+3``, so a block is usable only if ``3I+3 <= m-1`` (and likewise for
columns).  Blocks never share an edge.

Euclidean (d = 2): the cube is cut into 3x3 squares; a square matches when it
holds exactly three points, all in its central unit square, whose triangle
has longest side in ``(x, x + delta)`` with ``x`` the second longest and
``x + delta < 1``.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .generators import get_distribution
from .graph import GraphError, Network


class ConfigCount(NamedTuple):
    count: int
    cost: float
    blocks: int
    # (added edge id, removed edge id) per match
    swaps: list


def _lattice_grids(net: Network):
    m = int(net.meta["m"])
    a, b = np.minimum(net.u, net.v), np.maximum(net.u, net.v)
    horiz = np.full((m, m - 1), np.nan)
    vert = np.full((m - 1, m), np.nan)
    h_id = np.full((m, m - 1), -1, dtype=np.int64)
    v_id = np.full((m - 1, m), -1, dtype=np.int64)
    ids = np.arange(net.n_edges)
    is_h = b - a == 1
    is_v = b - a == m
    ra, ca = a // m, a % m
    horiz[ra[is_h], ca[is_h]] = net.length[is_h]
    h_id[ra[is_h], ca[is_h]] = ids[is_h]
    vert[ra[is_v], ca[is_v]] = net.length[is_v]
    v_id[ra[is_v], ca[is_v]] = ids[is_v]
    return m, horiz, vert, h_id, v_id


def _lattice_count(net: Network, delta: float) -> ConfigCount:
    if net.meta.get("d") != 2 or "m" not in net.meta:
        raise GraphError("non-lattice input")
    m, H, V, h_id, v_id = _lattice_grids(net)
    nb = (m - 1) // 3
    if nb == 0:
        return ConfigCount(0, 0.0, 0, [])
    I = 3 * np.arange(nb)[:, None]
    J = 3 * np.arange(nb)[None, :]
    r1, r2, c1, c2 = I + 1, I + 2, J + 1, J + 2
    # horizontal edge (r, c)-(r, c+1) is H[r, c]; vertical (r, c)-(r+1, c) is V[r, c]
    a = V[r1, c1]
    c = V[r1, c2]
    d = H[r1, c1]
    b = H[r2, c1]
    outer = np.stack([
        H[r1, c1 - 1], H[r2, c1 - 1], H[r1, c2], H[r2, c2],
        V[r1 - 1, c1], V[r1 - 1, c2], V[r2, c1], V[r2, c2],
    ])
    x = a
    hit = (b > x) & (b < x + delta) & (c < x) & (d < x) & np.all(outer > x + delta, axis=0)
    cost = math.fsum((b - a)[hit].tolist())
    rows, cols = np.nonzero(hit)
    swaps = [(int(h_id[3 * i + 2, 3 * j + 1]), int(v_id[3 * i + 1, 3 * j + 1])) for i, j in zip(rows, cols)]
    return ConfigCount(int(hit.sum()), cost, nb * nb, swaps)


def _euclidean_count(net: Network, delta: float) -> ConfigCount:
    pts = np.asarray(net.meta["coords"], dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise GraphError("euclidean configurations need d = 2")
    side = float(net.meta.get("side", net.n_vertices ** 0.5))
    nb = int(side // 3)
    if nb == 0:
        return ConfigCount(0, 0.0, 0, [])
    cell = np.floor(pts / 3.0).astype(np.int64)
    ok = np.all(cell < nb, axis=1)
    lin = np.where(ok, cell[:, 0] * nb + cell[:, 1], -1)
    counts = np.bincount(lin[ok], minlength=nb * nb)
    edge_of = net.edge_index()
    swaps, cost = [], []
    for sq in np.flatnonzero(counts == 3).tolist():
        members = np.flatnonzero(lin == sq)
        local = pts[members] - 3.0 * np.array(divmod(sq, nb))
        if not np.all((local > 1.0) & (local < 2.0)):
            continue
        sides = []
        for i, j in ((0, 1), (0, 2), (1, 2)):
            p, q = int(members[i]), int(members[j])
            key = (min(p, q), max(p, q))
            if key not in edge_of:
                break
            e = edge_of[key]
            sides.append((float(net.length[e]), e))
        else:
            sides.sort()
            x, longest = sides[1][0], sides[2][0]
            if x < longest < x + delta and x + delta < 1.0:
                swaps.append((sides[2][1], sides[1][1]))
                cost.append(longest - x)
    return ConfigCount(len(swaps), math.fsum(cost), nb * nb, swaps)


def config_count(net: Network, delta: float) -> ConfigCount:
    model = net.meta.get("model")
    if model == "lattice":
        return _lattice_count(net, delta)
    if model == "euclidean":
        return _euclidean_count(net, delta)
    raise GraphError("non-lattice input")


class ConfigRates(NamedTuple):
    q: float
    r: float
    # small-delta constant in q(delta) ~ c * delta: exact limit and the finite ratio q(h)/h
    c: float
    c_ratio: float


def _quad(fn, hi, points):
    pts = sorted(p for p in points if 0 < p < hi)
    val, _ = integrate.quad(fn, 0.0, hi, points=pts or None, epsabs=0.0, epsrel=1e-10, limit=400)
    return val


def rate_q(dist: str, delta: float) -> float:
    D = get_distribution(dist)
    f = lambda x: float(D.pdf(x))
    F = lambda x: float(D.cdf(x))
    fn = lambda x: f(x) * (F(x + delta) - F(x)) * F(x) ** 2 * (1.0 - F(x + delta)) ** 8
    return _quad(fn, D.x_max, [D.x_max - delta])


def rate_r(dist: str, delta: float) -> float:
    D = get_distribution(dist)
    f = lambda x: float(D.pdf(x))
    F = lambda x: float(D.cdf(x))
    fn = lambda x: f(x) * D.partial_moment(x, delta) * F(x) ** 2 * (1.0 - F(x + delta)) ** 8
    return _quad(fn, D.x_max, [D.x_max - delta])


def rate_constant(dist: str) -> float:
    """``lim q(delta)/delta = int f(x)^2 F(x)^2 (1 - F(x))^8 dx``."""
    D = get_distribution(dist)
    fn = lambda x: float(D.pdf(x)) ** 2 * float(D.cdf(x)) ** 2 * (1.0 - float(D.cdf(x))) ** 8
    return _quad(fn, D.x_max, [])


def config_rate_quadrature(dist: str, delta: float, h: float = 1e-4) -> ConfigRates:
    """Probability ``q`` of the lattice configuration per block and its mean exchange cost ``r``.

    The exp1 tail beyond ``x_max`` (where ``1 - F < 1e-12``) is dropped; its
    contribution to either integral is below ``1e-12``.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    return ConfigRates(rate_q(dist, delta), rate_r(dist, delta), rate_constant(dist), rate_q(dist, h) / h)
