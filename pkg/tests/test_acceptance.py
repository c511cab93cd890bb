"""Acceptance criteria 1-10, one test each.

Every test records a one-line PASS/FAIL verdict before asserting; the lines
are printed together at the end of the pytest session (see conftest.py).
Statistical criteria use the pre-registered seed lists in ``configs/``.
"""
from __future__ import annotations

import time

import numpy as np
import pytest

from nearmst import rng as _rng
from nearmst.cli import oracle_instances, sandwich_check
from nearmst.configs import config_rate_quadrature
from nearmst.excess import MergeTree, excess_table
from nearmst.experiments import ExperimentConfig, model1_lb_check, run_scaling_experiment, write_outputs
from nearmst.generators import EuclideanSpec, LatticeSpec, gen_euclidean, gen_lattice
from nearmst.graph import Network, kruskal_mst
from nearmst.spanning import enumerate_spanning_trees, matrix_tree_count

from conftest import load_config

RESULTS: dict[int, str] = {}


def verdict(num: int, title: str, ok: bool, detail: str, seconds: float | None = None) -> bool:
    took = "" if seconds is None else f" ({seconds:.1f} s)"
    RESULTS[num] = f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}{took}"
    return ok


@pytest.fixture(scope="module")
def reference():
    cfg = ExperimentConfig.from_dict(load_config("reference_lattice"))
    t0 = time.perf_counter()
    report = run_scaling_experiment(cfg)
    return report, time.perf_counter() - t0


def test_c01_oracle_sandwich():
    t0 = time.perf_counter()
    bad, ks = [], 0
    for i, net in oracle_instances(200, seed=2024):
        res = sandwich_check(net)
        ks += res["ks"]
        if not res["pass"]:
            bad.append((i, res["violations"][:2], res["gap_violations"]))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 60
    verdict(1, "oracle sandwich", ok, f"200 instances, {ks} (instance, k) checks, {len(bad)} violating", dt)
    assert ok, bad[:5]


def test_c02_mst_criterion():
    t0 = time.perf_counter()
    violations = 0
    edges = 0
    for i in range(50):
        for net in (gen_lattice(LatticeSpec(2, 100, "uniform01", _rng.derive_seed(7, "c2-lattice", i))),
                    gen_euclidean(EuclideanSpec(2, 10_000, _rng.derive_seed(7, "c2-euclid", i)))):
            mst = kruskal_mst(net)
            tbl = excess_table(net, mst)
            violations += int(np.count_nonzero((tbl.exc == 0) != mst.in_tree))
            edges += net.n_edges
    dt = time.perf_counter() - t0
    ok = violations == 0 and dt < 60
    verdict(2, "exc = 0 iff MST edge", ok, f"100 instances, {edges} edges, {violations} violations", dt)
    assert ok


def test_c03_dual_perc():
    t0 = time.perf_counter()
    bad = 0
    pairs = 0
    small = [gen_lattice(LatticeSpec(2, 14, dist, s)) for dist in ("uniform01", "exp1") for s in (1, 2)]
    small += [gen_euclidean(EuclideanSpec(2, 200, s)) for s in (1, 2)]
    for net in small:
        a, b = np.triu_indices(net.n_vertices, 1)
        pm, _ = kruskal_mst(net).index.path_max(a, b)
        bad += int(np.count_nonzero(MergeTree(net).perc(a, b) != pm))
        pairs += a.size
    g = np.random.default_rng(3)
    for net in (gen_lattice(LatticeSpec(2, 317, "uniform01", 3)), gen_euclidean(EuclideanSpec(2, 100_000, 3))):
        a, b = g.integers(0, net.n_vertices, (2, 100_000))
        pm, _ = kruskal_mst(net).index.path_max(a, b)
        pm = np.where(a == b, 0.0, pm)
        bad += int(np.count_nonzero(MergeTree(net).perc(a, b) != pm))
        pairs += a.size
    dt = time.perf_counter() - t0
    ok = bad == 0
    verdict(3, "merge-time perc = MST path max", ok, f"{pairs} pairs (6 exhaustive n<=200, 2x1e5 at n~1e5), "
            f"{bad} mismatches", dt)
    assert ok


def grid_graph(m: int) -> Network:
    from nearmst.generators import lattice_edges

    u, v = lattice_edges(2, m)
    return Network(m * m, u, v, np.arange(1, u.size + 1, dtype=float))


def test_c04_tree_count():
    t0 = time.perf_counter()
    nets = [grid_graph(3)] + [net for _, net in oracle_instances(49, seed=404)]
    bad = []
    for i, net in enumerate(nets):
        enum = sum(1 for _ in enumerate_spanning_trees(net))
        if enum != matrix_tree_count(net):
            bad.append(i)
    grid = matrix_tree_count(nets[0])
    dt = time.perf_counter() - t0
    ok = not bad and grid == 192
    verdict(4, "enumeration vs matrix-tree", ok, f"50 instances, 3x3 grid count {grid}, {len(bad)} mismatches", dt)
    assert ok


def test_c05_scaling_exponent(reference):
    report, dt = reference
    fit = report.fits[0]
    s_lb, s_ub = fit["lb"]["slope"], fit["ub"]["slope"]
    ratios = [r["ub_lb_ratio"] for r in report.curve]
    ok = (1.6 <= s_lb <= 2.4 and 1.6 <= s_ub <= 2.4 and max(ratios) <= 4 and dt < 300
          and not report.failures)
    verdict(5, "scaling exponent", ok, f"slope lb {s_lb:.3f}, slope ub {s_ub:.3f}, "
            f"ub/lb {min(ratios):.3f}..{max(ratios):.3f}", dt)
    assert ok


def test_c06_heuristic_constant(reference):
    report, _ = reference
    rows = [r for r in report.curve if r["delta"] <= 0.025]
    inside = [r["lb_mean"] / 3 <= r["predicted"] <= 3 * r["ub_mean"] for r in rows]
    ok = bool(rows) and all(inside)
    detail = ", ".join(f"d={r['delta']}: {r['predicted']:.3g} in [{r['lb_mean'] / 3:.3g}, {3 * r['ub_mean']:.3g}]"
                       for r in rows)
    verdict(6, "heuristic constant", ok, f"f_mu={report.f_mu[0]['f_mu_hat']:.3f}; {detail}")
    assert ok


def test_c07_configuration_law():
    cfg = ExperimentConfig.from_dict(load_config("config_law"))
    t0 = time.perf_counter()
    report = run_scaling_experiment(cfg)
    (row,) = report.configs
    # the quadrature self-check, read literally: q(1e-4)/1e-4 against 1/495
    rates = config_rate_quadrature("uniform01", 1e-4)
    self_rel = abs(rates.q / 1e-4 - 1 / 495) * 495
    dt = time.perf_counter() - t0
    freq_ok = abs(row["freq_mean"] - row["q"]) <= 3 * row["freq_se"]
    cost_ok = abs(row["cost_mean"] - row["r"]) <= 3 * row["cost_se"]
    quad_ok = self_rel <= 1e-6
    ok = freq_ok and cost_ok and quad_ok and dt < 180
    verdict(7, "configuration law", ok,
            f"{row['matches']} matches in {20 * row['blocks']} blocks; freq {row['freq_mean']:.3g} vs q {row['q']:.3g} "
            f"(3se {3 * row['freq_se']:.2g}) {'ok' if freq_ok else 'out'}; cost {row['cost_mean']:.3g} vs r "
            f"{row['r']:.3g} {'ok' if cost_ok else 'out'}; q(1e-4)/1e-4 vs 1/495 rel {self_rel:.3g} "
            f"{'ok' if quad_ok else 'out'}", dt)
    assert ok


def test_c08_analytic_lower_bound(reference):
    report, _ = reference
    ok, rows = model1_lb_check(report)
    worst = min(r["ub_mean"] / r["bound"] for r in rows)
    verdict(8, "analytic lower bound", ok, f"{len(rows)} deltas, smallest ub/bound {worst:.2f}")
    assert ok


def test_c09_density_shadow():
    cfg = ExperimentConfig.from_dict(load_config("percolation"))
    t0 = time.perf_counter()
    p = run_scaling_experiment(cfg).percolation
    dt = time.perf_counter() - t0
    ratio = p["density_ratio"]
    diffs = sum(p["interior_diff"])
    ok = p["replicas"] == 20 and ratio is not None and ratio <= 3 and diffs == 0 and dt < 300
    dens = ", ".join(f"{x:.3g}" for x in p["density_hat"])
    verdict(9, "density shadow", ok, f"density [{dens}], max/min {ratio:.3f}, interior diffs {diffs}, "
            f"boundary diffs {sum(p['boundary_diff'])}", dt)
    assert ok


def test_c10_determinism(tmp_path):
    t0 = time.perf_counter()
    runs = [
        load_config("reference_lattice"),
        load_config("config_law"),
        dict(load_config("percolation"), window=20.0, replicas=8, seeds=load_config("percolation")["seeds"][:8]),
        dict(load_config("reference_lattice"), model="euclidean", sizes=[4000], replicas=6,
             seeds=load_config("reference_lattice")["seeds"][:6], analyses=["curve", "mu"]),
    ]
    differing = []
    files = 0
    for j, raw in enumerate(runs):
        cfg = ExperimentConfig.from_dict(raw)
        out = {w: write_outputs(run_scaling_experiment(cfg, workers=w), tmp_path / f"{j}-{w}", figure=False)
               for w in (1, 8)}
        for key, path in out[1].items():
            files += 1
            if path.read_bytes() != out[8][key].read_bytes():
                differing.append(f"{j}:{key}")
    dt = time.perf_counter() - t0
    ok = not differing
    verdict(10, "determinism", ok, f"{len(runs)} configs, {files} CSV/JSON files, workers 1 vs 8, "
            f"{len(differing)} differ", dt)
    assert ok, differing
