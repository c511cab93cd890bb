"""Command line entry point: ``nearmst <subcommand> ...``."""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import rng as _rng
from .excess import empirical_mu, excess_table
from .exchange import STRATEGIES, epsilon_curve, epsilon_lower_bound, greedy_plan
from .experiments import ExperimentConfig, model1_lb_check, run_scaling_experiment, write_outputs
from .generators import EuclideanSpec, LatticeSpec, gen_euclidean, gen_lattice
from .graph import GraphError, Network, kruskal_mst
from .io import load_network, save_network
from .percolation import mu_density_estimate, perc_marks, sample_rooted
from .spanning import exact_profile, excess_gap_violations


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _cutoff(text: str):
    return text if text == "auto" else float(text)


def _writer(path):
    if path in (None, "-"):
        return sys.stdout, False
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", newline=""), True


def _emit(path, header, rows) -> None:
    fh, close = _writer(path)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if close:
            fh.close()


def cmd_gen(args) -> int:
    if args.model == "lattice":
        if args.m is None:
            raise SystemExit("--m is required for the lattice model")
        net = gen_lattice(LatticeSpec(args.d, args.m, args.dist, args.seed))
    else:
        if args.n is None:
            raise SystemExit("--n is required for the euclidean model")
        net = gen_euclidean(EuclideanSpec(args.d, args.n, args.seed, _cutoff(args.cutoff)))
    save_network(net, args.out)
    return 0


def cmd_excess(args) -> int:
    net = load_network(args.net)
    tbl = excess_table(net, kruskal_mst(net))
    _emit(args.out, ["edge_id", "u", "v", "len", "perc", "exc", "in_mst"], tbl.rows())
    return 0


def cmd_mu(args) -> int:
    net = load_network(args.net)
    tbl = excess_table(net, kruskal_mst(net))
    est = empirical_mu(tbl, _floats(args.xgrid))
    _emit(args.out, ["x", "mu_hat", "density_hat", "trusted"], est.rows())
    return 0


def cmd_curve(args) -> int:
    net = load_network(args.net)
    mst = kruskal_mst(net)
    tbl = excess_table(net, mst)
    curve = epsilon_curve(net, mst, tbl, _floats(args.deltas))
    rows = ((r.k, r.delta, r.lb, r.ub, "" if r.exact is None else r.exact, r.strategy) for r in curve.rows)
    _emit(args.out, ["k", "delta", "lb", "ub", "exact", "ub_strategy"], rows)
    return 0


def random_small_network(g: np.random.Generator, max_vertices: int = 9, max_edges: int = 16) -> Network:
    """A connected graph on 3..max_vertices vertices: random spanning tree plus extra edges."""
    n = int(g.integers(3, max_vertices + 1))
    perm = g.permutation(n)
    pairs = {tuple(sorted((int(perm[i]), int(perm[g.integers(0, i)])))) for i in range(1, n)}
    all_pairs = [(a, b) for a in range(n) for b in range(a + 1, n) if (a, b) not in pairs]
    extra = int(g.integers(0, min(len(all_pairs), max_edges - (n - 1)) + 1))
    for j in g.choice(len(all_pairs), size=extra, replace=False).tolist() if extra else []:
        pairs.add(all_pairs[j])
    pairs = sorted(pairs)
    lengths = g.permutation(len(pairs)) + g.random(len(pairs))
    return Network.from_edges(n, [(a, b, float(w) + 0.5) for (a, b), w in zip(pairs, lengths)])


def oracle_instances(count: int, seed: int):
    """Mixed 2x2 .. 3x3 lattices and random connected graphs with at most 9 vertices."""
    for i in range(count):
        g = _rng.generator(seed, "oracle-instance", i)
        kind = i % 3
        if kind == 0:
            yield i, gen_lattice(LatticeSpec(2, int(g.integers(2, 4)), "uniform01", _rng.derive_seed(seed, "oracle", i)))
        elif kind == 1:
            yield i, gen_lattice(LatticeSpec(2, 3, "exp1", _rng.derive_seed(seed, "oracle", i)))
        else:
            yield i, random_small_network(g)


def sandwich_check(net: Network, tol: float = 1e-12) -> dict:
    """LB <= exact <= greedy UB for every feasible k, plus the excess inequality on every tree."""
    mst = kruskal_mst(net)
    tbl = excess_table(net, mst)
    profile = exact_profile(net, mst)
    n = net.n_vertices
    pos = tbl.positive_excesses()
    scale = tol * max(1.0, mst.total_len)
    violations = []
    checked = 0
    prefix = {s: np.cumsum([0.0] + [c for _, _, c in greedy_plan(net, mst, tbl, pos.size, s).swaps])
              for s in STRATEGIES}
    for k in range(1, n):
        if not np.isfinite(profile[k:]).any():
            break
        exact = float(profile[k:].min())
        lb = epsilon_lower_bound(tbl, k) * n if k <= pos.size else None
        checked += 1
        if lb is not None and lb > exact + scale:
            violations.append(("lb>exact", k, lb, exact))
        for name, cum in prefix.items():
            if cum.size > k:
                ub = float(cum[k:].min())
                if exact > ub + scale:
                    violations.append((f"exact>ub[{name}]", k, exact, ub))
    gap = excess_gap_violations(net, tbl.exc, mst)
    return {"n": n, "m": net.n_edges, "ks": checked, "violations": violations, "gap_violations": gap,
            "pass": not violations and gap == 0}


def cmd_oracle(args) -> int:
    bad = 0
    for i, net in oracle_instances(args.instances, args.seed):
        res = sandwich_check(net)
        bad += not res["pass"]
        status = "PASS" if res["pass"] else "FAIL"
        print(f"instance {i:4d} n={res['n']:2d} m={res['m']:2d} ks={res['ks']:2d} {status}"
              + ("" if res["pass"] else f" {res['violations'][:3]} gap={res['gap_violations']}"))
    print(f"{args.instances - bad}/{args.instances} instances passed")
    return 1 if bad else 0


def cmd_percolation(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    marks = []
    for i in range(args.replicas):
        s = sample_rooted(args.d, args.window, _rng.derive_seed(args.seed, "replica", i))
        mk = perc_marks(s, cutoff=_cutoff(args.cutoff))
        marks.append(mk)
        axes = ["px", "py", "pz"][: args.d] if args.d <= 3 else [f"p{j}" for j in range(args.d)]
        _emit(out / f"marks_{i:03d}.csv", [*axes, "len", "perc", "exc", "interior"], mk.rows())
    est = mu_density_estimate(marks, _floats(args.xgrid))
    _emit(out / "mu.csv", ["x", "mu_hat", "density_hat", "trusted"], est.rows())
    return 0


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    out = args.out or cfg.output_dir or "."
    report = run_scaling_experiment(cfg, workers=args.workers)
    paths = write_outputs(report, out, figure=not args.no_figure)
    for fit in report.fits:
        print(f"size {fit['size']}: slope lb {fit['lb']['slope']}, slope ub {fit['ub']['slope']}")
    if cfg.model == "lattice" and report.curve:
        ok, _ = model1_lb_check(report)
        print(f"analytic lower-bound check: {'PASS' if ok else 'FAIL'}")
    for name, p in paths.items():
        print(f"wrote {name}: {p}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nearmst", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random network (CSV + JSON sidecar)")
    g.add_argument("--model", choices=["lattice", "euclidean"], required=True)
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--m", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--dist", choices=["uniform01", "exp1"], default="uniform01")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--cutoff", default="auto")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("excess", help="per-edge perc/excess table")
    e.add_argument("--net", required=True)
    e.add_argument("--out", default="-")
    e.set_defaults(func=cmd_excess)

    m = sub.add_parser("mu", help="empirical excess measure")
    m.add_argument("--net", required=True)
    m.add_argument("--xgrid", default="0.01,0.02,0.05,0.1,0.2")
    m.add_argument("--out", default="-")
    m.set_defaults(func=cmd_mu)

    c = sub.add_parser("curve", help="lower/upper/exact bounds on eps_n(delta)")
    c.add_argument("--net", required=True)
    c.add_argument("--deltas", default="0.00625,0.0125,0.025,0.05,0.1")
    c.add_argument("--out", default="-")
    c.set_defaults(func=cmd_curve)

    o = sub.add_parser("oracle", help="sandwich test on small generated instances")
    o.add_argument("--instances", type=int, default=20)
    o.add_argument("--seed", type=int, default=0)
    o.set_defaults(func=cmd_oracle)

    q = sub.add_parser("percolation", help="origin-rooted percolation marks on Poisson windows")
    q.add_argument("--d", type=int, default=2)
    q.add_argument("--window", type=float, default=50.0)
    q.add_argument("--replicas", type=int, default=1)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--xgrid", default="0.02,0.05,0.1,0.2")
    q.add_argument("--cutoff", default="auto")
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_percolation)

    x = sub.add_parser("experiment", help="run a declarative sweep from a JSON config")
    x.add_argument("--config", required=True)
    x.add_argument("--workers", type=int, default=1)
    x.add_argument("--out")
    x.add_argument("--no-figure", action="store_true")
    x.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
