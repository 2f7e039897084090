"""Spectral clustering on the refined graph with automatic cluster count.

Pipeline: refined graph -> local-scale affinity -> normalized operator ->
top eigenpairs -> eigengap scan for C -> k-means over embeddings v2..v_i for
i = 3..C -> keep the labeling whose inter-cluster edge weight is smallest.
"""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import metrics
from .affinity import AffinityMatrix, build_affinity, local_scales, normalized_operator
from .dataset import PointSet
from .eigen import EigenSystem, decompose, default_lambda_max
from .kmeans import kmeans
from .knn_graph import build_neighbor_table, default_k_max, edge_percentage, mutual_filter, refine_edges

log = logging.getLogger(__name__)

GAP_RULES = ("threshold", "mean_shift")


@dataclass(frozen=True)
class GapScan:
    gamma: np.ndarray          # 1 - eigenvalue, ascending
    running_mean: np.ndarray   # entry i-2 covers gamma_1..gamma_i (1-based i)
    running_std: np.ndarray
    detected_C: int
    triggered: bool
    rule: str = "threshold"
    floor: float = 0.0


@dataclass(frozen=True)
class CandidateLabeling:
    dims_used: int             # embedding is v2..v_{dims_used}
    labels: np.ndarray
    inter_cluster_weight: float
    inertia: float


@dataclass
class ClusterConfig:
    k_max: int | None = None
    baseline_n: int = 7
    scale_k: int = 7
    C: int | str = "auto"
    lambda_max: int | None = None
    seed: int = 0
    row_normalize: bool = True
    gap_rule: str = "threshold"
    gap_floor: float = 0.0
    kmeans_restarts: int = 1

    def resolved(self, n: int) -> "ClusterConfig":
        """Copy with data-dependent defaults filled in."""
        k_max = self.k_max if self.k_max is not None else default_k_max(n, self.baseline_n)
        lam = self.lambda_max if self.lambda_max is not None else default_lambda_max(n)
        if self.C != "auto":
            lam = max(lam, int(self.C))
        return ClusterConfig(k_max, self.baseline_n, self.scale_k, self.C, min(lam, n), self.seed,
                             self.row_normalize, self.gap_rule, self.gap_floor, self.kmeans_restarts)


@dataclass
class ClusteringReport:
    labels: np.ndarray
    C: int
    C_source: str              # "detected" or "given"
    candidates: list
    selected_dims: int
    config: ClusterConfig
    n: int
    edge_count: int
    e_percent: float
    n_components: int
    isolated: np.ndarray
    degenerate_scales: np.ndarray
    gap: GapScan | None
    eigenvalues: np.ndarray
    low_confidence: bool = False
    metrics: dict | None = None
    metrics_without_noise: dict | None = None
    warnings: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        gap = None
        if self.gap is not None:
            gap = {
                "rule": self.gap.rule,
                "floor": self.gap.floor,
                "gamma": self.gap.gamma.tolist(),
                "running_mean": self.gap.running_mean.tolist(),
                "running_std": self.gap.running_std.tolist(),
                "detected_C": self.gap.detected_C,
                "triggered": self.gap.triggered,
            }
        return {
            "config": asdict(self.config),
            "n": self.n,
            "C": self.C,
            "C_source": self.C_source,
            "detected_C": self.gap.detected_C if self.gap else None,
            "low_confidence": self.low_confidence,
            "gap_scan": gap,
            "eigenvalues": self.eigenvalues.tolist(),
            "candidates": [
                {"dims_used": c.dims_used, "inter_cluster_weight": c.inter_cluster_weight,
                 "kmeans_inertia": c.inertia}
                for c in self.candidates
            ],
            "selected_dims": self.selected_dims,
            "edge_count": self.edge_count,
            "e_percent": self.e_percent,
            "n_components": self.n_components,
            "isolated_vertices": self.isolated.tolist(),
            "degenerate_scales": self.degenerate_scales.tolist(),
            "metrics": self.metrics,
            "metrics_without_noise": self.metrics_without_noise,
            "warnings": list(self.warnings),
            "labels": self.labels.tolist(),
            "timings": self.timings,
        }


def _sample_std(w):
    return float(np.std(w, ddof=1)) if w.size > 1 else 0.0


def detect_C(es: EigenSystem, lambda_max: int | None = None, rule: str = "threshold",
             floor_frac: float = 0.0) -> GapScan:
    """Scan the ascending spectrum gamma = 1 - eigenvalue for the first abrupt jump.

    With 1-based indices, for i = 2 .. lambda_max - 1 the window is
    gamma_1..gamma_i. ``rule="threshold"`` triggers when gamma_{i+1} exceeds
    the window mean plus its sample standard deviation; ``rule="mean_shift"``
    triggers when the mean of the window extended by gamma_{i+1} does. The
    first trigger fixes C = i. Without a trigger C = lambda_max.

    ``floor_frac`` > 0 puts a lower bound of ``floor_frac * (gamma_max - gamma_1)``
    on the standard deviation, so that ratio jumps among near-zero values
    (weakly coupled blocks of unequal strength) do not count as a gap.
    """
    if rule not in GAP_RULES:
        raise ValueError(f"unknown gap rule {rule!r}")
    if es.m < 4:
        raise ValueError(f"gap scan needs at least 4 eigenpairs, got {es.m}")
    lambda_max = es.m if lambda_max is None else int(lambda_max)
    if not 4 <= lambda_max <= es.m:
        raise ValueError(f"lambda_max={lambda_max} must lie in 4..{es.m}")
    if not 0.0 <= floor_frac < 1.0:
        raise ValueError(f"gap floor must lie in [0, 1), got {floor_frac}")

    gamma = 1.0 - np.asarray(es.values[:lambda_max], dtype=float)
    # rounding can leave tiny inversions among (near-)equal eigenvalues
    gamma = np.maximum.accumulate(gamma)
    floor = floor_frac * float(gamma[-1] - gamma[0])
    means, stds = [], []
    detected, triggered = lambda_max, False
    for i in range(2, lambda_max):
        window = gamma[:i]
        mu, sd = float(window.mean()), max(_sample_std(window), floor)
        means.append(mu)
        stds.append(sd)
        if rule == "threshold":
            fire = gamma[i] > mu + sd
        else:
            fire = float(gamma[: i + 1].mean()) > mu + sd
        if fire:
            detected, triggered = i, True
            break
    return GapScan(gamma, np.array(means), np.array(stds), detected, triggered, rule, floor)


def build_embedding(es: EigenSystem, i: int, row_normalize: bool = True) -> np.ndarray:
    """Columns v2..v_i (1-based, descending eigenvalue); ``i = 2`` gives v2 alone."""
    if not 2 <= i <= es.m:
        raise ValueError(f"embedding index i={i} must lie in 2..{es.m}")
    emb = np.array(es.vectors[:, 1:i], dtype=float)
    if row_normalize:
        norms = np.linalg.norm(emb, axis=1)
        nz = norms > 0
        emb[nz] /= norms[nz, None]
    return emb


def inter_cluster_weight(a: AffinityMatrix, labels) -> float:
    """Total affinity on undirected edges whose endpoints carry different labels."""
    labels = np.asarray(labels)
    g = a.graph
    if labels.shape != (g.n,):
        raise ValueError(f"expected {g.n} labels, got shape {labels.shape}")
    cut = labels[g.rows] != labels[g.cols]
    return float(np.sum(a.edge_weights[cut]))


def _candidate_seed(seed, i):
    return int(np.random.SeedSequence([int(seed), int(i)]).generate_state(1)[0])


def cluster(ps, config: ClusterConfig | None = None, **overrides) -> ClusteringReport:
    """Run the full pipeline on a PointSet (or bare point matrix)."""
    if not isinstance(ps, PointSet):
        ps = PointSet(ps)
    config = config or ClusterConfig()
    if overrides:
        config = ClusterConfig(**{**asdict(config), **overrides})
    n = ps.n
    if n < 4:
        raise ValueError(f"clustering needs at least 4 points, got {n}")
    if config.gap_rule not in GAP_RULES:
        raise ValueError(f"unknown gap rule {config.gap_rule!r}")
    given_C = None if config.C == "auto" else int(config.C)
    if given_C is not None and not 1 <= given_C <= n:
        raise ValueError(f"C must lie in 1..N={n}, got {given_C}")
    cfg = config.resolved(n)
    timings = {}
    warnings = []

    t0 = time.perf_counter()
    nt = build_neighbor_table(ps.points, cfg.k_max)
    keep, adaptive_k = refine_edges(nt, cfg.baseline_n)
    graph = mutual_filter(nt, keep, adaptive_k)
    timings["graph_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    scales, degenerate = local_scales(nt, cfg.scale_k)
    aff = build_affinity(graph, scales)
    op = normalized_operator(aff)
    timings["affinity_s"] = time.perf_counter() - t0

    isolated = graph.isolated()
    if isolated.size:
        warnings.append(f"{isolated.size} isolated vertices after mutual filtering")
    if degenerate.size:
        warnings.append(f"{degenerate.size} points with zero local scale were repaired")

    t0 = time.perf_counter()
    es = decompose(op, max(min(cfg.lambda_max, n), 2))
    timings["eigen_s"] = time.perf_counter() - t0

    gap = None
    if given_C is None:
        if es.m < 4:
            raise ValueError("automatic C needs lambda_max >= 4")
        gap = detect_C(es, es.m, cfg.gap_rule, cfg.gap_floor)
        C = gap.detected_C
        if not gap.triggered:
            warnings.append(f"eigengap scan never triggered; C set to lambda_max={C} (low confidence)")
        sizes = np.bincount(graph.components())
        if np.sum(sizes > 1) <= 1:
            warnings.append("graph is a single connected component; detected C is unreliable "
                            "(low confidence)")
        low_confidence = any("low confidence" in w for w in warnings)
    else:
        C = given_C
        low_confidence = False

    t0 = time.perf_counter()
    candidates = []
    if C == 1:
        warnings.append("C = 1: all points assigned to a single cluster")
        labels = np.zeros(n, dtype=np.int64)
        candidates.append(CandidateLabeling(1, labels, 0.0, 0.0))
    else:
        # C = 2 has an empty 3..C sweep; v2 alone is the bipartition embedding
        dims = [2] if C == 2 else range(3, C + 1)
        for i in dims:
            emb = build_embedding(es, i, cfg.row_normalize)
            km = kmeans(emb, C, seed=_candidate_seed(cfg.seed, i), restarts=cfg.kmeans_restarts)
            labels = km.labels.astype(np.int64)
            candidates.append(CandidateLabeling(i, labels, inter_cluster_weight(aff, labels), km.inertia))
    # strict "<" keeps the fewest dimensions on ties
    best = candidates[0]
    for c in candidates[1:]:
        if c.inter_cluster_weight < best.inter_cluster_weight:
            best = c
    timings["clustering_s"] = time.perf_counter() - t0

    report = ClusteringReport(
        labels=best.labels, C=C, C_source="given" if given_C is not None else "detected",
        candidates=candidates, selected_dims=best.dims_used, config=cfg, n=n,
        edge_count=graph.edge_count, e_percent=edge_percentage(graph),
        n_components=graph.n_components(), isolated=isolated, degenerate_scales=degenerate,
        gap=gap, eigenvalues=np.asarray(es.values), low_confidence=low_confidence,
        warnings=warnings, timings=timings,
    )
    if ps.labels is not None:
        report.metrics = metrics.evaluate(ps.labels, best.labels)
        if ps.noise_label is not None:
            mask = ps.labels != ps.noise_label
            if mask.sum() >= 2:
                report.metrics_without_noise = metrics.evaluate(ps.labels[mask], best.labels[mask])
    for w in warnings:
        log.info(w)
    return report
