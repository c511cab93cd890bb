"""Static figures for experiment reports (matplotlib, Agg backend)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.2,
    "legend.frameon": False,
    # fixed salt so SVG element ids do not change between runs
    "svg.hashsalt": "nearmst",
}


def plot_curve(report, path) -> None:
    """Log-log lower/upper bounds against delta, one panel, with fitted slopes."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 3.8))
        for fit in report.fits:
            size = fit["size"]
            rows = report.rows_for(size)
            delta = np.array([r["delta"] for r in rows])
            lb = np.array([r["lb_mean"] for r in rows])
            ub = np.array([r["ub_mean"] for r in rows])
            lab_lb = f"lower, size {size}"
            lab_ub = f"upper, size {size}"
            if fit["lb"]["slope"] is not None:
                lab_lb += f" (slope {fit['lb']['slope']:.2f})"
                lab_ub += f" (slope {fit['ub']['slope']:.2f})"
            ax.loglog(delta, lb, "o-", label=lab_lb)
            ax.loglog(delta, ub, "s--", label=lab_ub)
            pred = [r["predicted"] for r in rows]
            if all(p is not None for p in pred):
                ax.loglog(delta, pred, ":", color="0.4", label=r"$\delta^2/(2\hat f_\mu)$")
        ax.set_xlabel(r"$\delta$")
        ax.set_ylabel(r"$\varepsilon_n(\delta)$ bounds")
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(path, metadata={"Date": None})
        plt.close(fig)
