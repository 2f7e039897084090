import numpy as np
import pytest
from scipy import sparse

from oracles import block_operator_matrix, dense_normalized
from rknn_spectral.affinity import normalized_operator
from rknn_spectral.eigen import EigenError, decompose, default_lambda_max, residuals


def _random_operator(n, density, seed):
    rng = np.random.default_rng(seed)
    m = sparse.random(n, n, density=density, random_state=seed,
                      data_rvs=lambda k: rng.uniform(0.05, 1, k))
    m = sparse.triu(m, 1)
    m = (m + m.T).tocsr()
    return normalized_operator(m), m


def _check_invariants(op, es):
    assert np.all(residuals(op.matrix, es.values, es.vectors) <= 1e-8)
    gram = es.vectors.T @ es.vectors
    assert np.abs(gram - np.eye(es.m)).max() <= 1e-8
    assert np.all(es.values <= 1 + 1e-9) and np.all(es.values >= -1 - 1e-9)
    assert np.all(np.diff(es.values) <= 1e-12)


def test_swap_operator():
    es = decompose(sparse.csr_matrix([[0.0, 1.0], [1.0, 0.0]]), 2)
    assert es.values == pytest.approx([1.0, -1.0], abs=1e-12)
    s = 1 / np.sqrt(2)
    assert es.vectors[:, 0] == pytest.approx([s, s], abs=1e-12)
    # sign rule: first of the tied largest-magnitude entries is positive
    assert es.vectors[:, 1] == pytest.approx([s, -s], abs=1e-12)


def test_two_cliques_multiplicity():
    a, _ = block_operator_matrix(2, size=6, noise=0.0)
    es = decompose(normalized_operator(sparse.csr_matrix(a)), 6)
    assert abs(es.values[0] - 1) < 1e-9 and abs(es.values[1] - 1) < 1e-9
    assert es.values[2] < 1 - 1e-3


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_matches_dense_oracle(seed):
    op, affinity = _random_operator(50, 0.15, seed)
    es = decompose(op, 10)
    full_vals, full_vecs = np.linalg.eigh(dense_normalized(affinity))
    expect = full_vals[::-1][:10]
    assert np.allclose(es.values, expect, atol=1e-8)
    _check_invariants(op, es)
    # each returned vector lies in the oracle eigenspace of its value
    for k in range(10):
        space = full_vecs[:, np.abs(full_vals - es.values[k]) < 1e-7]
        proj = space @ (space.T @ es.vectors[:, k])
        assert np.linalg.norm(proj - es.vectors[:, k]) < 1e-7


@pytest.mark.parametrize("c", [2, 3, 4, 5])
def test_ideal_components_multiplicity(c):
    a, _ = block_operator_matrix(c, size=15, noise=0.0)
    op = normalized_operator(sparse.csr_matrix(a))
    es = decompose(op, 12)
    _check_invariants(op, es)
    assert np.sum(np.abs(es.values - 1) <= 1e-9) == c


def test_isolated_vertices_get_zero():
    a = np.zeros((5, 5))
    a[0, 1] = a[1, 0] = 1.0
    a[2, 3] = a[3, 2] = 0.5
    op = normalized_operator(sparse.csr_matrix(a))
    es = decompose(op, 5)
    assert es.values.tolist() == pytest.approx([1, 1, 0, -1, -1], abs=1e-12)
    _check_invariants(op, es)


def test_sparse_path_matches_dense():
    op, _ = _random_operator(300, 0.03, 7)
    dense = decompose(op, 8)
    lanczos = decompose(op, 8, dense_limit=10)
    assert np.allclose(dense.values, lanczos.values, atol=1e-9)
    _check_invariants(op, lanczos)


def test_result_is_immutable_and_checked():
    op, _ = _random_operator(30, 0.2, 4)
    es = decompose(op, 4)
    with pytest.raises(ValueError):
        es.values[0] = 0.0
    with pytest.raises(ValueError):
        decompose(op, 1)
    with pytest.raises(ValueError):
        decompose(op, 31)
    assert issubclass(EigenError, RuntimeError)
    assert default_lambda_max(10) == 10 and default_lambda_max(1000) == 25
