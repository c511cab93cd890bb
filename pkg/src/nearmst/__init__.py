"""Minimal spanning trees on random networks and the cost of near-minimal trees."""

__version__ = "0.1.0"

from .graph import DisjointSet, GraphError, MstResult, Network, components_at, is_spanning_tree, kruskal_mst
from .generators import EuclideanSpec, LatticeSpec, dist_density_bound, gen_euclidean, gen_lattice
from .excess import (ExcessTable, MergeTree, MuEstimate, empirical_mu, excess_table, excluded_perc, path_max,
                     perc_all_pairs)
from .exchange import (EpsilonCurve, SwapPlan, epsilon_curve, epsilon_lower_bound, greedy_exchange)
from .spanning import exact_epsilon, matrix_tree_count

__all__ = [
    "DisjointSet", "GraphError", "MstResult", "Network", "components_at", "is_spanning_tree", "kruskal_mst",
    "EuclideanSpec", "LatticeSpec", "dist_density_bound", "gen_euclidean", "gen_lattice",
    "ExcessTable", "MergeTree", "MuEstimate", "empirical_mu", "excess_table", "excluded_perc", "path_max",
    "perc_all_pairs", "EpsilonCurve", "SwapPlan", "epsilon_curve", "epsilon_lower_bound", "greedy_exchange",
    "exact_epsilon", "matrix_tree_count",
]
