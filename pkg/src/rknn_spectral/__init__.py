"""Spectral clustering on a refined, mutual k-nearest-neighbor graph."""

from .dataset import DataError, PointSet, generate, inject_noise, load_csv, save_csv, standardize
from .eigen import EigenSystem, decompose
from .knn_graph import NeighborTable, RefinedGraph, build_neighbor_table, refined_graph
from .metrics import accuracy, ari, evaluate, nmi
from .spectral import ClusterConfig, ClusteringReport, cluster, detect_C

__all__ = [
    "ClusterConfig", "ClusteringReport", "DataError", "EigenSystem", "NeighborTable",
    "PointSet", "RefinedGraph", "accuracy", "ari", "build_neighbor_table", "cluster",
    "decompose", "detect_C", "evaluate", "generate", "inject_noise", "load_csv", "nmi",
    "refined_graph", "save_csv", "standardize",
]
__version__ = "0.1.0"
