"""External clustering indices: accuracy, pair-counting ARI, and NMI."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment


@dataclass(frozen=True)
class PairCounts:
    n11: int  # same cluster in T and in L
    n00: int  # different in both
    n01: int  # same in T, different in L
    n10: int  # different in T, same in L

    @property
    def total(self) -> int:
        return self.n11 + self.n00 + self.n01 + self.n10


def _check(t, l, min_len=1):
    t = np.asarray(t).ravel()
    l = np.asarray(l).ravel()
    if t.shape != l.shape:
        raise ValueError(f"label vectors differ in length: {t.size} vs {l.size}")
    if t.size < min_len:
        raise ValueError(f"need at least {min_len} labels, got {t.size}")
    return t, l


def contingency(t, l) -> np.ndarray:
    t, l = _check(t, l)
    _, ti = np.unique(t, return_inverse=True)
    _, li = np.unique(l, return_inverse=True)
    table = np.zeros((ti.max() + 1, li.max() + 1), dtype=np.int64)
    np.add.at(table, (ti, li), 1)
    return table


def accuracy(t, l) -> float:
    """Fraction of hits under the best one-to-one mapping of predicted ids onto true ids."""
    table = contingency(t, l)
    rows, cols = linear_sum_assignment(table, maximize=True)
    return float(table[rows, cols].sum()) / float(table.sum())


def pair_counts(t, l) -> PairCounts:
    t, l = _check(t, l, min_len=2)
    table = contingency(t, l)
    n = int(table.sum())

    def pairs(x):
        x = np.asarray(x, dtype=np.int64)
        return int(np.sum(x * (x - 1) // 2))

    total = n * (n - 1) // 2
    n11 = pairs(table)
    same_t = pairs(table.sum(axis=1))
    same_l = pairs(table.sum(axis=0))
    n01 = same_t - n11
    n10 = same_l - n11
    return PairCounts(n11, total - n11 - n01 - n10, n01, n10)


def ari(t, l) -> float:
    """Pair-count form 2(n00 n11 - n01 n10) / ((n00+n01)(n01+n11) + (n00+n10)(n10+n11)).

    A zero denominator only arises when both labelings put all points in one
    cluster or all in singletons; the result is 1.0 if the partitions agree
    and 0.0 otherwise. Values are not clamped at zero.
    """
    c = pair_counts(t, l)
    num = 2 * (c.n00 * c.n11 - c.n01 * c.n10)
    den = (c.n00 + c.n01) * (c.n01 + c.n11) + (c.n00 + c.n10) * (c.n10 + c.n11)
    if den == 0:
        return 1.0 if c.n01 == 0 and c.n10 == 0 else 0.0
    return num / den


def _entropy(counts, n):
    p = counts[counts > 0] / n
    return float(-np.sum(p * np.log(p)))


def nmi(t, l) -> float:
    """Mutual information normalized by the larger of the two entropies (natural log)."""
    table = contingency(t, l)
    n = table.sum()
    ht = _entropy(table.sum(axis=1), n)
    hl = _entropy(table.sum(axis=0), n)
    if ht == 0 and hl == 0:
        return 1.0
    if ht == 0 or hl == 0:
        return 0.0
    pt = table.sum(axis=1, keepdims=True) / n
    pl = table.sum(axis=0, keepdims=True) / n
    pj = table / n
    nz = pj > 0
    mi = float(np.sum(pj[nz] * np.log(pj[nz] / (pt @ pl)[nz])))
    return mi / max(ht, hl)


def evaluate(t, l) -> dict:
    return {"acc": accuracy(t, l), "ari": ari(t, l), "nmi": nmi(t, l)}
