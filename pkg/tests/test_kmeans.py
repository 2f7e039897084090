import itertools

import numpy as np
import pytest

from rknn_spectral.kmeans import kmeans, make_rng


def test_single_cluster_is_the_mean():
    x = np.random.default_rng(0).normal(size=(40, 3))
    res = kmeans(x, 1, seed=4)
    assert np.allclose(res.centroids[0], x.mean(axis=0))
    assert res.inertia == pytest.approx(x.var(axis=0).sum() * 40, rel=1e-12)
    assert np.all(res.labels == 0)


def test_two_points_two_clusters():
    res = kmeans([[0.0, 0.0], [3.0, 4.0]], 2, seed=1)
    assert sorted(res.labels.tolist()) == [0, 1]
    assert res.inertia == 0.0


def _three_blobs():
    rng = np.random.default_rng(12)
    centers = np.array([[0, 0], [20, 0], [0, 20]])
    x = np.vstack([c + rng.normal(0, 0.3, (20, 2)) for c in centers])
    return x, np.repeat(np.arange(3), 20)


def _best_partition_cost(x, truth):
    # the three blobs are the only partition whose within-cost is below any mixed one;
    # brute force over label permutations confirms membership up to renaming
    return sum(((x[truth == c] - x[truth == c].mean(axis=0)) ** 2).sum() for c in range(3))


@pytest.mark.parametrize("seed", range(20))
def test_three_blobs_every_seed(seed):
    x, truth = _three_blobs()
    res = kmeans(x, 3, seed=seed)
    hit = max(np.mean(np.array(p)[res.labels] == truth) for p in itertools.permutations(range(3)))
    assert hit == 1.0
    assert res.inertia == pytest.approx(_best_partition_cost(x, truth), rel=1e-9)


def test_seeded_determinism_and_restarts():
    x = np.random.default_rng(3).uniform(size=(100, 2))
    a, b = kmeans(x, 5, seed=9), kmeans(x, 5, seed=9)
    assert np.array_equal(a.labels, b.labels) and a.inertia == b.inertia
    best = kmeans(x, 5, seed=9, restarts=6)
    assert best.inertia <= a.inertia
    assert make_rng(1, 2).random() == make_rng(1, 2).random()
    assert make_rng(1, 2).random() != make_rng(1, 3).random()


def test_inertia_never_increases():
    x = np.random.default_rng(4).normal(size=(200, 2))
    hist = kmeans(x, 6, seed=2).inertia_history
    assert all(b <= a + 1e-9 for a, b in zip(hist, hist[1:]))


def test_coincident_points_still_fill_every_cluster():
    x = np.vstack([np.zeros((5, 2)), np.ones((5, 2))])
    res = kmeans(x, 3, seed=0)
    assert set(res.labels.tolist()) == {0, 1, 2}


def test_assignment_tie_goes_to_lower_index():
    # point 1 is equidistant from the two final centroids
    res = kmeans([[0.0], [1.0], [2.0]], 2, seed=0, max_iter=0)
    d = np.abs(np.array([[0.0], [1.0], [2.0]]) - res.centroids.T)
    for i, row in enumerate(d):
        assert res.labels[i] == int(np.flatnonzero(row == row.min())[0])


def test_errors():
    with pytest.raises(ValueError):
        kmeans([[0.0], [1.0]], 3)
    with pytest.raises(ValueError):
        kmeans([[0.0], [np.nan]], 1)
