"""Locally scaled affinities and the symmetric normalized operator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .knn_graph import NeighborTable, RefinedGraph


@dataclass(frozen=True)
class AffinityMatrix:
    matrix: sparse.csr_matrix      # symmetric, zero diagonal
    local_scales: np.ndarray
    graph: RefinedGraph
    edge_weights: np.ndarray       # aligned with graph.rows / graph.cols

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class NormalizedOperator:
    matrix: sparse.csr_matrix
    degrees: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def local_scales(nt: NeighborTable, scale_k: int = 7, repair: bool = True):
    """Distance from every point to its ``scale_k``-th neighbor.

    Taken from the unfiltered neighbor table. With ``repair`` on, a zero
    scale (at least ``scale_k`` duplicates) is replaced by the smallest
    positive distance in that row, or by machine epsilon when the whole row
    is zero. Returns ``(scales, degenerate)`` where ``degenerate`` lists the
    indices that needed repair.
    """
    if not 1 <= scale_k <= nt.k_max:
        raise ValueError(f"scale_k={scale_k} must lie in 1..k_max={nt.k_max}")
    sigma = nt.dists[:, scale_k - 1].copy()
    degenerate = np.flatnonzero(sigma <= 0)
    if repair:
        for i in degenerate:
            positive = nt.dists[i][nt.dists[i] > 0]
            sigma[i] = positive[0] if positive.size else np.finfo(float).eps
    return sigma, degenerate


def build_affinity(g: RefinedGraph, scales) -> AffinityMatrix:
    scales = np.asarray(scales, dtype=np.float64)
    if scales.shape != (g.n,):
        raise ValueError(f"expected {g.n} scales, got shape {scales.shape}")
    if np.any(~(scales > 0)):
        raise ValueError("local scales must be strictly positive")
    w = np.exp(-(g.dists**2) / (scales[g.rows] * scales[g.cols]))
    # exp underflow would drop an edge from the sparsity pattern
    w = np.maximum(w, np.finfo(float).tiny)
    return AffinityMatrix(g.adjacency(w), scales, g, w)


def normalized_operator(a) -> NormalizedOperator:
    """D^-1/2 A D^-1/2 with zero-degree rows and columns left at zero."""
    m = a.matrix if isinstance(a, AffinityMatrix) else sparse.csr_matrix(a)
    deg = np.asarray(m.sum(axis=1)).ravel()
    inv_sqrt = np.zeros_like(deg)
    nz = deg > 0
    inv_sqrt[nz] = 1.0 / np.sqrt(deg[nz])
    d = sparse.diags(inv_sqrt)
    op = (d @ m @ d).tocsr()
    # exact symmetry regardless of rounding in the product
    op = ((op + op.T) * 0.5).tocsr()
    op.sort_indices()
    return NormalizedOperator(op, deg)


def write_coo(matrix, path) -> None:
    """Dump a sparse matrix as ``i j value`` lines with 17 significant digits."""
    coo = sparse.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8") as fh:
        for k in order:
            fh.write(f"{coo.row[k]} {coo.col[k]} {coo.data[k]:.17g}\n")
