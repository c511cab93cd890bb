from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from nearmst.graph import Network

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"


def load_config(name: str) -> dict:
    return json.loads((CONFIGS / f"{name}.json").read_text())


def triangle() -> Network:
    # a=0, b=1, c=2; edges ab, bc, ac
    return Network.from_edges(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)])


def four_cycle() -> Network:
    # edge ids: a=0, b=1, c=2, d=3 around the square 0-1-2-3
    return Network.from_edges(4, [(0, 1, 0.9), (1, 2, 0.95), (2, 3, 0.3), (3, 0, 0.5)])


def path3() -> Network:
    return Network.from_edges(3, [(0, 1, 1.0), (1, 2, 2.0)])


def shared_max_instance() -> Network:
    """Two non-tree edges (0-2 and 1-3) whose cycles share the tree edge 1-2."""
    return Network.from_edges(6, [
        (0, 1, 1.0), (1, 2, 10.0), (2, 3, 1.5), (3, 4, 2.0), (4, 5, 3.0),
        (0, 2, 10.5), (1, 3, 10.8), (3, 5, 4.0),
    ])


def lattice_from_grids(H: np.ndarray, V: np.ndarray) -> Network:
    """2-d lattice with horizontal lengths ``H[r, c]`` for (r,c)-(r,c+1) and vertical ``V[r, c]`` for (r,c)-(r+1,c)."""
    m = H.shape[0]
    edges = []
    for r in range(m):
        for c in range(m - 1):
            edges.append((r * m + c, r * m + c + 1, float(H[r, c])))
    for r in range(m - 1):
        for c in range(m):
            edges.append((r * m + c, (r + 1) * m + c, float(V[r, c])))
    return Network.from_edges(m * m, edges, {"model": "lattice", "d": 2, "m": m, "n": m * m})


def special_block(x=0.5, b=0.55, delta=0.1):
    """4x4 lattice holding one special block; returns (net, ids) with ids of a, b, c, d."""
    m = 4
    rng = np.random.default_rng(5)
    H = rng.uniform(0.01, 0.2, (m, m - 1))
    V = rng.uniform(0.01, 0.2, (m - 1, m))
    V[1, 1] = x          # a: left vertical of the 4-cycle
    H[2, 1] = b          # b: top
    V[1, 2] = 0.3        # c
    H[1, 1] = 0.2        # d
    outer = x + delta + 0.05 + 0.01 * np.arange(8)
    H[1, 0], H[2, 0], H[1, 2], H[2, 2] = outer[:4]
    V[0, 1], V[0, 2], V[2, 1], V[2, 2] = outer[4:]
    net = lattice_from_grids(H, V)
    idx = net.edge_index()
    ids = {
        "a": idx[(1 * m + 1, 2 * m + 1)],
        "b": idx[(2 * m + 1, 2 * m + 2)],
        "c": idx[(1 * m + 2, 2 * m + 2)],
        "d": idx[(1 * m + 1, 1 * m + 2)],
    }
    return net, ids


@pytest.fixture
def tri():
    return triangle()


@pytest.fixture
def cyc():
    return four_cycle()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        terminalreporter.write_line(results[num])
