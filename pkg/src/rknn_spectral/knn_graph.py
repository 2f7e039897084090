"""Exact k-nearest-neighbor table and the adaptive, mutually-agreed refined graph."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.spatial import cKDTree

# Relative slack when comparing a prefix threshold against the baseline one.
# Identical distances (lattices, duplicated rows) otherwise flip on the last ulp
# of the prefix mean.
THRESHOLD_RTOL = 1e-12


@dataclass(frozen=True)
class NeighborTable:
    ids: np.ndarray    # (N, k_max) int64, ascending distance, ties by index
    dists: np.ndarray  # (N, k_max) float64

    @property
    def k_max(self) -> int:
        return self.ids.shape[1]

    @property
    def n(self) -> int:
        return self.ids.shape[0]


@dataclass(frozen=True)
class RefinedGraph:
    n: int
    rows: np.ndarray   # i < j, lexicographically sorted
    cols: np.ndarray
    dists: np.ndarray
    adaptive_k: np.ndarray

    @property
    def edge_count(self) -> int:
        return int(self.rows.size)

    def adjacency(self, weights=None) -> sparse.csr_matrix:
        """Symmetric sparse matrix carrying ``weights`` (distances by default) on both triangles."""
        w = self.dists if weights is None else np.asarray(weights, dtype=float)
        r = np.concatenate([self.rows, self.cols])
        c = np.concatenate([self.cols, self.rows])
        return sparse.csr_matrix((np.concatenate([w, w]), (r, c)), shape=(self.n, self.n))

    def degrees(self) -> np.ndarray:
        return np.bincount(self.rows, minlength=self.n) + np.bincount(self.cols, minlength=self.n)

    def isolated(self) -> np.ndarray:
        return np.flatnonzero(self.degrees() == 0)

    def components(self) -> np.ndarray:
        """Connected-component id of every vertex."""
        from scipy.sparse.csgraph import connected_components

        return connected_components(self.adjacency(np.ones(self.edge_count)), directed=False)[1]

    def n_components(self) -> int:
        return int(self.components().max()) + 1


def default_k_max(n: int, baseline_n: int = 7) -> int:
    return min(n - 1, max(3 * baseline_n, 30))


def _pair_dists(points, i, j):
    diff = points[i] - points[j]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def build_neighbor_table(points, k_max: int) -> NeighborTable:
    """Exact k_max nearest neighbors of every point, self excluded.

    A kd-tree proposes k_max + 2 candidates per point. Rows whose candidate
    list ends inside a run of tied distances are re-queried with a radius
    search so that ties are always resolved by the smaller point index.
    """
    points = np.asarray(getattr(points, "points", points), dtype=np.float64)
    n = points.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 points for a neighbor table, got {n}")
    if not 1 <= k_max < n:
        raise ValueError(f"k_max must satisfy 1 <= k_max < N={n}, got {k_max}")

    tree = cKDTree(points)
    q = min(k_max + 2, n)
    cand_d, cand_i = tree.query(points, k=q)

    ids = np.empty((n, k_max), dtype=np.int64)
    dists = np.empty((n, k_max))
    if q > k_max + 1:
        boundary = cand_d[:, k_max]
        ambiguous = cand_d[:, k_max + 1] <= boundary * (1 + 1e-9) + 1e-300
    else:
        # every other point is a candidate already
        ambiguous = np.zeros(n, dtype=bool)

    for i in range(n):
        if ambiguous[i]:
            radius = cand_d[i, k_max] * (1 + 1e-9) + 1e-300
            cand = np.asarray(tree.query_ball_point(points[i], radius), dtype=np.int64)
        else:
            cand = cand_i[i]
        cand = cand[cand != i]
        d = _pair_dists(points, i, cand)
        order = np.lexsort((cand, d))[:k_max]
        ids[i] = cand[order]
        dists[i] = d[order]
    return NeighborTable(ids, dists)


def running_threshold(dists_row) -> np.ndarray:
    """Mean plus population standard deviation of every prefix of a row.

    Works on a single row or on a 2-D array of rows.
    """
    x = np.asarray(dists_row, dtype=np.float64)
    squeeze = x.ndim == 1
    x = np.atleast_2d(x)
    out = np.empty_like(x)
    mean = np.zeros(x.shape[0])
    m2 = np.zeros(x.shape[0])
    # Welford updates: constant prefixes keep an exact mean and zero spread
    for j in range(x.shape[1]):
        delta = x[:, j] - mean
        mean = mean + delta / (j + 1)
        m2 = m2 + delta * (x[:, j] - mean)
        out[:, j] = mean + np.sqrt(np.maximum(m2, 0.0) / (j + 1))
    return out[0] if squeeze else out


def refine_edges(nt: NeighborTable, baseline_n: int = 7):
    """Adaptive per-point edge cut.

    Keeps neighbor j of point i iff the prefix threshold at j does not exceed
    the threshold at ``baseline_n``. Returns ``(keep, adaptive_k)`` where
    ``keep`` is an (N, k_max) boolean mask aligned with ``nt.ids``.
    """
    if baseline_n < 2:
        raise ValueError(f"baseline_n must be >= 2, got {baseline_n}")
    if baseline_n > nt.k_max:
        raise ValueError(f"baseline_n={baseline_n} exceeds k_max={nt.k_max}")
    dm = running_threshold(nt.dists)
    base = dm[:, baseline_n - 1 : baseline_n]
    keep = dm <= base * (1 + THRESHOLD_RTOL)
    return keep, keep.sum(axis=1)


def mutual_filter(nt: NeighborTable, keep, adaptive_k=None) -> RefinedGraph:
    """Undirected graph of the surviving directed edges that exist in both directions."""
    keep = np.asarray(keep, dtype=bool)
    n = nt.n
    if adaptive_k is None:
        adaptive_k = keep.sum(axis=1)
    src = np.repeat(np.arange(n), nt.k_max)[keep.ravel()]
    dst = nt.ids.ravel()[keep.ravel()]
    dd = nt.dists.ravel()[keep.ravel()]
    directed = sparse.csr_matrix((np.ones(src.size), (src, dst)), shape=(n, n))
    mutual = sparse.triu(directed.multiply(directed.T), k=1).tocoo()

    # attach distances from the table (identical from either endpoint)
    lookup = sparse.csr_matrix((dd, (src, dst)), shape=(n, n))
    rows = mutual.row.astype(np.int64)
    cols = mutual.col.astype(np.int64)
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    dists = np.asarray(lookup[rows, cols]).ravel() if rows.size else np.empty(0)
    return RefinedGraph(n, rows, cols, dists, np.asarray(adaptive_k, dtype=np.int64))


def refined_graph(points, k_max=None, baseline_n: int = 7):
    """Neighbor table plus refined graph for a point matrix or PointSet."""
    points = np.asarray(getattr(points, "points", points), dtype=np.float64)
    if k_max is None:
        k_max = default_k_max(points.shape[0], baseline_n)
    nt = build_neighbor_table(points, k_max)
    keep, adaptive_k = refine_edges(nt, baseline_n)
    return nt, mutual_filter(nt, keep, adaptive_k)


def edge_percentage(g: RefinedGraph) -> float:
    if g.n < 2:
        raise ValueError("edge percentage needs at least 2 vertices")
    return 100.0 * g.edge_count / (g.n * (g.n - 1) / 2)


def write_edge_list(g: RefinedGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for i, j, d in zip(g.rows, g.cols, g.dists):
            fh.write(f"{i} {j} {float(d)!r}\n")


def graph_summary(g: RefinedGraph) -> dict:
    hist = np.bincount(g.adaptive_k)
    return {
        "n": g.n,
        "edge_count": g.edge_count,
        "e_percent": edge_percentage(g),
        "adaptive_k_histogram": {str(k): int(c) for k, c in enumerate(hist) if c},
    }


def write_graph_summary(g: RefinedGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(graph_summary(g), fh, indent=2)
        fh.write("\n")
