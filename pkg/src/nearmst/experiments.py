"""Declarative sweeps: scaling exponent, heuristic constant, configuration law."""
from __future__ import annotations

import csv
import json
import math
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from scipy import stats

from . import __version__
from . import rng as _rng
from .configs import config_count, config_rate_quadrature
from .excess import empirical_mu, excess_table
from .exchange import epsilon_curve
from .generators import EuclideanSpec, LatticeSpec, dist_density_bound, gen_euclidean, gen_lattice
from .graph import kruskal_mst
from .percolation import msf_window_diagnostic, mu_density_estimate, perc_marks, sample_rooted, window_network

ANALYSES = ("curve", "mu", "configs", "percolation")


@dataclass
class ExperimentConfig:
    model: str = "lattice"
    d: int = 2
    sizes: list = field(default_factory=lambda: [64])
    dist: str = "uniform01"
    cutoff: Any = "auto"
    deltas: list = field(default_factory=lambda: [0.00625, 0.0125, 0.025, 0.05, 0.1])
    replicas: int = 4
    seed: int = 0
    # explicit per-replica seeds; when empty they are derived from ``seed``
    seeds: list = field(default_factory=list)
    analyses: list = field(default_factory=lambda: ["curve", "mu"])
    mu_grid: list = field(default_factory=lambda: [0.01, 0.02, 0.05, 0.1, 0.2])
    config_deltas: list = field(default_factory=lambda: [0.5])
    window: float = 50.0
    perc_grid: list = field(default_factory=lambda: [0.02, 0.05, 0.1, 0.2])
    min_k_fit: int = 20
    exact: bool = False
    output_dir: str | None = None

    def __post_init__(self):
        if self.model not in ("lattice", "euclidean"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if any(not 0 < x < 1 for x in self.deltas) or list(self.deltas) != sorted(set(self.deltas)):
            raise ValueError("deltas must be increasing inside (0, 1)")
        bad = set(self.analyses) - set(ANALYSES)
        if bad:
            raise ValueError(f"unknown analyses {sorted(bad)}")
        if self.seeds and len(self.seeds) != self.replicas:
            raise ValueError("seeds must list one seed per replica")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return asdict(self)

    def replica_seeds(self) -> list[int]:
        if self.seeds:
            return [int(s) for s in self.seeds]
        return [_rng.derive_seed(self.seed, "replica", i) for i in range(self.replicas)]


def _build(cfg: ExperimentConfig, size: int, seed: int):
    if cfg.model == "lattice":
        return gen_lattice(LatticeSpec(cfg.d, size, cfg.dist, seed))
    return gen_euclidean(EuclideanSpec(cfg.d, size, seed, cfg.cutoff))


def _replica(task) -> dict:
    cfg, size, index, seed = task
    out: dict[str, Any] = {"size": size, "replica": index, "seed": seed}
    try:
        net = _build(cfg, size, seed)
        out["n"] = net.n_vertices
        if {"curve", "mu"} & set(cfg.analyses):
            mst = kruskal_mst(net)
            tbl = excess_table(net, mst)
            if "curve" in cfg.analyses:
                curve = epsilon_curve(net, mst, tbl, cfg.deltas, exact="auto" if cfg.exact else False)
                out["curve"] = [asdict(r) for r in curve.rows]
            if "mu" in cfg.analyses:
                mu = empirical_mu(tbl, cfg.mu_grid)
                out["mu"] = {"mu_hat": mu.mu_hat.tolist(), "density_hat": mu.density_hat.tolist(),
                             "trusted": mu.trusted.tolist()}
        if "configs" in cfg.analyses and cfg.d == 2:
            out["configs"] = [config_count(net, x)[:3] for x in cfg.config_deltas]
    except Exception as exc:  # recorded per replica; the run aborts only on too many
        out["error"] = f"{type(exc).__name__}: {exc}"
    return out


def _perc_replica(task) -> dict:
    cfg, index, seed = task
    out: dict[str, Any] = {"replica": index, "seed": seed}
    try:
        s = sample_rooted(cfg.d, cfg.window, seed)
        net = window_network(s, "auto") if s.n_points else None
        marks = perc_marks(s, net=net)
        diag = msf_window_diagnostic(s, net=net) if net is not None else {"interior_diff": [], "boundary_diff": []}
        out["marks"] = marks
        out["n_points"] = s.n_points
        out["interior_diff"] = len(diag["interior_diff"])
        out["boundary_diff"] = len(diag["boundary_diff"])
    except Exception as exc:
        out["error"] = f"{type(exc).__name__}: {exc}"
    return out


def _map(fn, tasks, workers: int):
    if workers <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _mean_se(values) -> tuple[float, float]:
    x = np.asarray(values, dtype=float)
    if x.size < 2:
        return float(x.mean()), 0.0
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def fit_exponent(deltas, values, level: float = 0.95) -> dict:
    """Least-squares slope of ``log(values)`` against ``log(deltas)``."""
    x = np.log(np.asarray(deltas, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    if x.size < 2:
        return {"slope": None, "intercept": None, "ci": None, "points": int(x.size)}
    A = np.stack([x, np.ones_like(x)], axis=1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    slope, icpt = float(coef[0]), float(coef[1])
    ci = None
    if x.size > 2:
        resid = y - A @ coef
        s2 = float(resid @ resid) / (x.size - 2)
        se = math.sqrt(s2 / float(((x - x.mean()) ** 2).sum()))
        h = float(stats.t.ppf(0.5 + level / 2, x.size - 2)) * se
        ci = [slope - h, slope + h]
    return {"slope": slope, "intercept": icpt, "ci": ci, "points": int(x.size)}


@dataclass
class RunReport:
    config: dict
    manifest: dict
    curve: list = field(default_factory=list)
    fits: list = field(default_factory=list)
    mu: list = field(default_factory=list)
    f_mu: list = field(default_factory=list)
    configs: list = field(default_factory=list)
    percolation: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def rows_for(self, size: int) -> list[dict]:
        return [r for r in self.curve if r["size"] == size]


class ExperimentError(RuntimeError):
    pass


def run_scaling_experiment(cfg: ExperimentConfig, workers: int = 1) -> RunReport:
    seeds = cfg.replica_seeds()
    manifest = {
        "package": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
        "replica_seeds": seeds,
    }
    report = RunReport(cfg.to_dict(), manifest)
    needs_net = {"curve", "mu", "configs"} & set(cfg.analyses)
    tasks = [(cfg, size, i, s) for size in cfg.sizes for i, s in enumerate(seeds)] if needs_net else []
    results = _map(_replica, tasks, workers)
    report.failures = [{"size": r["size"], "replica": r["replica"], "error": r["error"]}
                       for r in results if "error" in r]
    if tasks and len(report.failures) > 0.1 * len(tasks):
        raise ExperimentError(f"{len(report.failures)} of {len(tasks)} replicas failed")
    ok = [r for r in results if "error" not in r]

    for size in cfg.sizes:
        reps = [r for r in ok if r["size"] == size]
        if not reps:
            continue
        n = reps[0]["n"]
        f_hat = None
        if "mu" in cfg.analyses:
            mu_hat = np.array([r["mu"]["mu_hat"] for r in reps])
            dens = np.array([r["mu"]["density_hat"] for r in reps])
            trusted = np.all([r["mu"]["trusted"] for r in reps], axis=0)
            for j, x in enumerate(cfg.mu_grid):
                m, mse = _mean_se(mu_hat[:, j])
                dm, dse = _mean_se(dens[:, j])
                report.mu.append({"size": size, "x": x, "mu_hat": m, "mu_se": mse, "density_hat": dm,
                                  "density_se": dse, "trusted": bool(trusted[j])})
            f_hat, f_se = _mean_se(dens[:, 0])
            report.f_mu.append({"size": size, "x0": cfg.mu_grid[0], "f_mu_hat": f_hat, "se": f_se})
        if "curve" in cfg.analyses:
            rows = []
            for j, delta in enumerate(cfg.deltas):
                cells = [r["curve"][j] for r in reps]
                lb, lb_se = _mean_se([c["lb"] for c in cells])
                ub, ub_se = _mean_se([c["ub"] for c in cells])
                ex = [c["exact"] for c in cells]
                row = {
                    "size": size, "n": n, "delta": delta, "k": cells[0]["k"],
                    "lb_mean": lb, "lb_se": lb_se, "ub_mean": ub, "ub_se": ub_se,
                    "ub_lb_ratio": ub / lb if lb > 0 else None,
                    "exact_mean": float(np.mean(ex)) if all(e is not None for e in ex) else None,
                    "lb_trusted": all(c["lb_trusted"] for c in cells),
                    "predicted": delta**2 / (2 * f_hat) if f_hat else None,
                }
                rows.append(row)
            report.curve.extend(rows)
            usable = [r for r in rows if r["k"] >= cfg.min_k_fit and r["lb_trusted"] and r["lb_mean"] > 0]
            report.fits.append({
                "size": size,
                "delta_range": [usable[0]["delta"], usable[-1]["delta"]] if usable else None,
                "lb": fit_exponent([r["delta"] for r in usable], [r["lb_mean"] for r in usable]),
                "ub": fit_exponent([r["delta"] for r in usable], [r["ub_mean"] for r in usable]),
            })
        if "configs" in cfg.analyses and cfg.d == 2:
            for j, delta in enumerate(cfg.config_deltas):
                cells = [r["configs"][j] for r in reps]
                freq, freq_se = _mean_se([c[0] / c[2] for c in cells])
                cost, cost_se = _mean_se([c[1] / c[2] for c in cells])
                entry = {"size": size, "delta": delta, "blocks": cells[0][2], "matches": sum(c[0] for c in cells),
                         "freq_mean": freq, "freq_se": freq_se, "cost_mean": cost, "cost_se": cost_se,
                         "q": None, "r": None, "freq_within_3se": None, "cost_within_3se": None}
                if cfg.model == "lattice":
                    rates = config_rate_quadrature(cfg.dist, delta)
                    entry.update({
                        "q": rates.q, "r": rates.r, "c": rates.c,
                        "freq_within_3se": bool(abs(freq - rates.q) <= 3 * freq_se),
                        "cost_within_3se": bool(abs(cost - rates.r) <= 3 * cost_se),
                    })
                report.configs.append(entry)

    if "percolation" in cfg.analyses:
        ptasks = [(cfg, i, s) for i, s in enumerate(seeds)]
        pres = _map(_perc_replica, ptasks, workers)
        fails = [{"percolation_replica": r["replica"], "error": r["error"]} for r in pres if "error" in r]
        report.failures.extend(fails)
        if len(fails) > 0.1 * len(ptasks):
            raise ExperimentError(f"{len(fails)} of {len(ptasks)} percolation replicas failed")
        good = [r for r in pres if "error" not in r]
        est = mu_density_estimate([r["marks"] for r in good], cfg.perc_grid)
        dens = est.density_hat
        report.percolation = {
            "window": cfg.window,
            "replicas": len(good),
            "x": est.x_grid.tolist(),
            "mu_hat": est.mu_hat.tolist(),
            "mu_se": est.mu_se.tolist(),
            "density_hat": dens.tolist(),
            "density_se": est.density_se.tolist(),
            "density_ratio": float(dens.max() / dens.min()) if dens.min() > 0 else None,
            "interior_diff": [r["interior_diff"] for r in good],
            "boundary_diff": [r["boundary_diff"] for r in good],
            "mean_points": float(np.mean([r["n_points"] for r in good])),
        }
    return report


def model1_lb_check(report: RunReport) -> tuple[bool, list[dict]]:
    """Mean upper bound against the analytic lower bound ``(c_n/n) delta^2 / (8 fbar)``.

    ``c_n`` is the lattice edge count, ``2(n - sqrt(n))`` for ``d = 2``.
    """
    cfg = report.config
    if cfg["model"] != "lattice":
        raise ValueError("only defined for the lattice model")
    fbar = dist_density_bound(cfg["dist"])
    d = cfg["d"]
    out = []
    for row in report.curve:
        m = row["size"]
        n = m**d
        c_n = d * m ** (d - 1) * (m - 1)
        bound = (c_n / n) * row["delta"] ** 2 / (8 * fbar)
        out.append({"size": m, "delta": row["delta"], "ub_mean": row["ub_mean"], "bound": bound,
                    "margin": row["ub_mean"] - bound, "pass": row["ub_mean"] >= bound})
    return all(r["pass"] for r in out), out


def _write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(["" if v is None else v for v in row])


def write_outputs(report: RunReport, out_dir, figure: bool = True) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"report": out / "report.json"}
    paths["report"].write_text(json.dumps(report.to_dict(), sort_keys=True, indent=1) + "\n")
    cols = ["size", "n", "delta", "k", "lb_mean", "lb_se", "ub_mean", "ub_se", "ub_lb_ratio", "exact_mean", "predicted"]
    paths["curve"] = out / "curve.csv"
    _write_csv(paths["curve"], cols, ([r[c] for c in cols] for r in report.curve))
    cols = ["size", "x", "mu_hat", "mu_se", "density_hat", "density_se", "trusted"]
    paths["mu"] = out / "mu.csv"
    _write_csv(paths["mu"], cols, ([r[c] if c != "trusted" else int(r[c]) for c in cols] for r in report.mu))
    cols = ["size", "delta", "blocks", "matches", "freq_mean", "freq_se", "q", "cost_mean", "cost_se", "r",
            "freq_within_3se", "cost_within_3se"]
    paths["configs"] = out / "configs.csv"
    _write_csv(paths["configs"], cols, ([r[c] for c in cols] for r in report.configs))
    if report.percolation:
        p = report.percolation
        paths["percolation"] = out / "percolation_mu.csv"
        _write_csv(paths["percolation"], ["x", "mu_hat", "density_hat", "trusted"],
                   zip(p["x"], p["mu_hat"], p["density_hat"], [1] * len(p["x"])))
    if figure and report.curve:
        from .plotting import plot_curve

        paths["figure"] = out / "curve.svg"
        plot_curve(report, paths["figure"])
    return paths
