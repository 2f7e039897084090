"""Top eigenpairs of the symmetric normalized operator.

The operator is block diagonal over the connected components of its graph,
so each component is decomposed on its own and the results are merged. Every
component with positive volume contributes eigenvalue 1 with eigenvector
D^1/2 1 restricted to that component; isolated vertices contribute
eigenvalue 0. The eigenvalue-1 space is therefore known in closed form, and
a fixed basis is used for it: the global D^1/2 1 first, then contrasts of
one component against all remaining ones, components taken by decreasing
volume (smallest vertex index on ties). Dropping the first vector then
leaves every component at a distinct, nonzero embedding position; only
isolated vertices sit at the origin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

DENSE_LIMIT = 2000
RESIDUAL_TOL = 1e-8


class EigenError(RuntimeError):
    pass


@dataclass(frozen=True)
class EigenSystem:
    values: np.ndarray   # descending
    vectors: np.ndarray  # (N, m), column j pairs with values[j]

    @property
    def m(self) -> int:
        return self.values.size


def default_lambda_max(n: int) -> int:
    return min(n, 25)


def _fix_signs(vectors):
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def residuals(matrix, values, vectors) -> np.ndarray:
    r = matrix @ vectors - vectors * values
    return np.linalg.norm(r, axis=0)


def _block_pairs(block, m, dense_limit):
    """Largest ``m`` eigenpairs of one symmetric block, ascending."""
    n = block.shape[0]
    if n <= dense_limit or m >= n - 1:
        return scipy.linalg.eigh(block.toarray(), subset_by_index=[n - m, n - 1])
    v0 = np.random.default_rng(0).standard_normal(n)
    try:
        vals, vecs = eigsh(block, k=m, which="LA", v0=v0, tol=0.0, maxiter=max(1000, 20 * n))
    except ArpackNoConvergence as exc:
        res = residuals(block, exc.eigenvalues, exc.eigenvectors)
        raise EigenError(f"Lanczos did not converge; residual norms {res.tolist()}") from exc
    # Rayleigh-Ritz on the returned basis restores orthonormality inside clusters
    q, _ = np.linalg.qr(vecs)
    ritz = q.T @ (block @ q)
    vals, rot = np.linalg.eigh((ritz + ritz.T) / 2)
    return vals, q @ rot


def decompose(op, m: int, degrees=None, dense_limit: int = DENSE_LIMIT) -> EigenSystem:
    """Largest ``m`` eigenpairs of ``op``, sorted by descending eigenvalue.

    ``op`` is a NormalizedOperator (its degrees are used) or a bare symmetric
    matrix of that form, in which case ``degrees`` may be passed explicitly.
    Without degrees, each component's leading eigenvector is taken from the
    solver instead of the closed form. Dense LAPACK handles components up to
    ``dense_limit`` vertices, implicitly restarted Lanczos the rest. Each
    eigenvector is signed so its largest-magnitude entry is positive (first
    such entry on ties).
    """
    matrix = sparse.csr_matrix(getattr(op, "matrix", op), dtype=np.float64)
    if degrees is None:
        degrees = getattr(op, "degrees", None)
    n = matrix.shape[0]
    if not 2 <= m <= n:
        raise ValueError(f"number of eigenpairs m={m} must lie in 2..N={n}")

    n_comp, comp = connected_components(matrix, directed=False)
    members = [np.flatnonzero(comp == c) for c in range(n_comp)]
    if degrees is not None:
        degrees = np.asarray(degrees, dtype=np.float64)
        volume = np.array([degrees[idx].sum() for idx in members])
    else:
        volume = np.array([abs(matrix[idx][:, idx]).sum() for idx in members])
    order = np.lexsort((np.array([idx[0] for idx in members]), -volume))

    lead = []   # closed-form eigenvalue-1 vectors, one per component with edges
    rest = []   # (value, component rank, position, member indices, vector)
    for r, c in enumerate(order):
        idx = members[c]
        if volume[c] == 0:
            rest.extend((0.0, r, p, idx[p:p + 1], np.ones(1)) for p in range(idx.size))
            continue
        block = matrix[idx][:, idx]
        k = min(m, idx.size)
        vals, vecs = _block_pairs(block, k, dense_limit)
        vals, vecs = vals[::-1], vecs[:, ::-1]
        if degrees is None:
            rest.extend((float(vals[p]), r, p, idx, vecs[:, p]) for p in range(k))
            continue
        top = np.sqrt(degrees[idx])
        top /= np.linalg.norm(top)
        lead.append((idx, top))
        if k > 1:
            # re-solve the remainder orthogonally to the closed-form leading vector
            tail = vecs[:, 1:] - np.outer(top, top @ vecs[:, 1:])
            tail, _ = np.linalg.qr(tail)
            ritz = tail.T @ (block @ tail)
            tv, rot = np.linalg.eigh((ritz + ritz.T) / 2)
            tvecs = (tail @ rot)[:, ::-1]
            tv = np.minimum(tv[::-1], 1.0)
            rest.extend((float(tv[p]), r, p + 1, idx, tvecs[:, p]) for p in range(k - 1))

    values, columns = [], []
    if lead:
        # Basis of the eigenvalue-1 space: first the global D^1/2 1, then
        # Gram-Schmidt contrasts of each component (by volume) against the rest.
        q = len(lead)
        u = np.zeros((n, q))
        for col, (idx, top) in enumerate(lead):
            u[idx, col] = top
        vol = np.sort(volume[volume > 0])[::-1]
        mix = np.eye(q)
        mix[:, 1:] = np.eye(q)[:, : q - 1]
        mix[:, 0] = np.sqrt(vol) / np.linalg.norm(np.sqrt(vol))
        rot, tri = np.linalg.qr(mix)
        rot *= np.sign(np.diag(tri))
        basis = u @ rot
        for col in range(min(q, m)):
            values.append(1.0)
            columns.append(basis[:, col])
    rest.sort(key=lambda t: (-t[0], t[1], t[2]))
    for val, _, _, idx, vec in rest[: m - len(values)]:
        full = np.zeros(n)
        full[idx] = vec
        values.append(val)
        columns.append(full)
    values = np.array(values)
    vectors = _fix_signs(np.column_stack(columns))

    res = residuals(matrix, values, vectors)
    limit = RESIDUAL_TOL * np.maximum(1.0, np.abs(values))
    if np.any(res > limit):
        raise EigenError(f"eigenpair residuals exceed tolerance: {res.tolist()}")
    values.setflags(write=False)
    vectors.setflags(write=False)
    return EigenSystem(values, vectors)
