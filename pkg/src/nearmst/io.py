"""Network CSV (``u,v,len``) with an optional JSON sidecar holding model metadata."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .graph import GraphError, Network

META_KEYS = ("model", "d", "m", "n", "seed", "dist", "cutoff", "coords", "validated", "side", "n_vertices")


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_suffix(path.suffix + ".json") if path.suffix != ".json" else path


def save_network(net: Network, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["u", "v", "len"])
        for a, b, x in zip(net.u.tolist(), net.v.tolist(), net.length.tolist()):
            w.writerow([a, b, repr(x)])
    meta = {k: v for k, v in net.meta.items() if k in META_KEYS}
    meta["n_vertices"] = net.n_vertices
    if "coords" in meta:
        meta["coords"] = np.asarray(meta["coords"], dtype=float).ravel().tolist()
    sidecar_path(path).write_text(json.dumps(meta, sort_keys=True) + "\n")


def load_network(path, meta_path=None) -> Network:
    """Read a network, validating the substrate invariants.  Tied lengths are rejected."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames[:3]] != ["u", "v", "len"]:
            raise GraphError("expected header u,v,len")
        rows = [(int(r["u"]), int(r["v"]), float(r["len"])) for r in reader]
    meta_path = Path(meta_path) if meta_path else sidecar_path(path)
    meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
    n = meta.get("n_vertices")
    if n is None:
        n = 1 + max((max(a, b) for a, b, _ in rows), default=-1)
    if "coords" in meta and meta.get("d"):
        meta["coords"] = np.asarray(meta["coords"], dtype=float).reshape(-1, int(meta["d"]))
    net = Network.from_edges(int(n), rows, meta)
    if not net.has_distinct_lengths():
        raise GraphError("tied lengths")
    return net
