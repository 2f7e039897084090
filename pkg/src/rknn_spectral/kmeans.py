"""Seeded Lloyd k-means with k-means++ initialization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class KMeansResult:
    labels: np.ndarray
    centroids: np.ndarray
    inertia: float
    iterations: int
    inertia_history: list = field(default_factory=list, repr=False)


def make_rng(*key) -> np.random.Generator:
    """Counter-based generator keyed on integers (seed, then optional sub-keys)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(k) for k in key])))


def _sq_dists(x, centroids):
    # (N, k) squared Euclidean distances, computed by explicit differences
    diff = x[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def kmeans_pp(x, k, rng):
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    closest = _sq_dists(x, x[chosen])[:, 0]
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            # inverse-CDF draw keeps the choice a pure function of one uniform
            cdf = np.cumsum(closest)
            nxt = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
            nxt = min(nxt, n - 1)
        else:
            unused = np.setdiff1d(np.arange(n), chosen)
            nxt = int(unused[rng.integers(unused.size)])
        chosen.append(nxt)
        closest = np.minimum(closest, _sq_dists(x, x[[nxt]])[:, 0])
    return x[chosen].copy()


def _repair_empty(x, labels, centroids, d2):
    """Move each empty cluster's centroid onto the point farthest from its own centroid."""
    k = centroids.shape[0]
    counts = np.bincount(labels, minlength=k)
    own = d2[np.arange(x.shape[0]), labels]
    taken = np.zeros(x.shape[0], dtype=bool)
    for c in np.flatnonzero(counts == 0):
        donors = np.flatnonzero((np.bincount(labels, minlength=k)[labels] > 1) & ~taken)
        if donors.size == 0:
            break
        p = donors[np.argmax(own[donors])]
        taken[p] = True
        labels[p] = c
        centroids[c] = x[p]
    return labels


def _lloyd(x, centroids, max_iter, tol):
    k = centroids.shape[0]
    history = []
    it = 0
    while True:
        d2 = _sq_dists(x, centroids)
        labels = np.argmin(d2, axis=1)
        if np.bincount(labels, minlength=k).min() == 0:
            labels = _repair_empty(x, labels, centroids, d2)
        inertia = float(np.sum((x - centroids[labels]) ** 2))
        history.append(inertia)
        if it >= max_iter:
            break
        new = np.vstack([x[labels == c].mean(axis=0) for c in range(k)])
        shift = float(np.max(np.linalg.norm(new - centroids, axis=1)))
        centroids = new
        it += 1
        if shift <= tol:
            d2 = _sq_dists(x, centroids)
            labels = np.argmin(d2, axis=1)
            if np.bincount(labels, minlength=k).min() == 0:
                labels = _repair_empty(x, labels, centroids, d2)
            history.append(float(np.sum((x - centroids[labels]) ** 2)))
            break
    return labels, centroids, history[-1], it, history


def kmeans(points, k: int, seed: int = 0, max_iter: int = 100, tol: float = 1e-6,
           restarts: int = 1) -> KMeansResult:
    """Cluster rows of ``points`` into ``k`` groups.

    Fully determined by ``seed``; with ``restarts > 1`` the run of lowest
    inertia wins (earliest on ties). Assignment ties go to the lower
    centroid index.
    """
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must satisfy 1 <= k <= N={n}, got {k}")
    if not np.all(np.isfinite(x)):
        raise ValueError("k-means input contains non-finite values")

    best = None
    for r in range(restarts):
        rng = make_rng(seed, r)
        labels, centroids, inertia, it, hist = _lloyd(x, kmeans_pp(x, k, rng), max_iter, tol)
        if best is None or inertia < best.inertia:
            best = KMeansResult(labels, centroids, inertia, it, hist)
    return best
