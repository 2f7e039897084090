import math

import numpy as np
import pytest

from rknn_spectral.dataset import (DEFAULTS, DataError, PointSet, generate, inject_noise, load_csv,
                                   save_csv, standardize)


def write(tmp_path, text, name="in.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_plain_rows(tmp_path):
    ps = load_csv(write(tmp_path, "0,0\n1,1\n2,2\n"))
    assert (ps.n, ps.d) == (3, 2)
    assert ps.labels is None


def test_string_labels_reencoded(tmp_path):
    ps = load_csv(write(tmp_path, "0,0,a\n1,1,b\n"), label_column=2)
    assert ps.labels.tolist() == [0, 1]
    ps = load_csv(write(tmp_path, "0,0,z\n1,1,a\n2,2,z\n"), label_column=2)
    assert ps.labels.tolist() == [0, 1, 0]


def test_header_is_skipped(tmp_path):
    ps = load_csv(write(tmp_path, "x,y,label\n0,0,1\n1,1,0\n"), label_column=2)
    assert ps.n == 2
    assert ps.points.tolist() == [[0, 0], [1, 1]]


def test_nan_reports_position(tmp_path):
    with pytest.raises(DataError) as exc:
        load_csv(write(tmp_path, "0,NaN\n"))
    assert exc.value.row == 1 and exc.value.column == 2
    assert "row 1, column 2" in str(exc.value)


@pytest.mark.parametrize("text, row, col", [
    ("0,0\n1,abc\n", 2, 2),
    ("0,0\n1\n", 2, None),
    ("0,0\n1,inf\n", 2, 2),
])
def test_malformed_rows(tmp_path, text, row, col):
    with pytest.raises(DataError) as exc:
        load_csv(write(tmp_path, text))
    assert exc.value.row == row
    assert exc.value.column == col


def test_empty_and_missing(tmp_path):
    with pytest.raises(DataError):
        load_csv(write(tmp_path, "\n\n"))
    with pytest.raises(DataError):
        load_csv(tmp_path / "nope.csv")
    with pytest.raises(DataError):
        load_csv(write(tmp_path, "0,0\n"), label_column=5)


def test_round_trip_is_exact(tmp_path):
    ps = generate("rings", seed=3)
    save_csv(ps, tmp_path / "r.csv")
    back = load_csv(tmp_path / "r.csv", label_column=2)
    assert np.array_equal(back.points, ps.points)
    assert np.array_equal(back.labels, ps.labels)


def test_pointset_validation():
    with pytest.raises(DataError):
        PointSet([[0.0, np.inf]])
    with pytest.raises(DataError):
        PointSet([[0.0], [1.0]], labels=[0, 2])
    ps = PointSet([[0.0], [1.0]], labels=[1, 0])
    assert ps.n_classes == 2
    with pytest.raises(ValueError):
        ps.points[0, 0] = 5.0


def test_rings_example():
    ps = generate("rings", {"counts": [300, 300], "radii": [1, 3], "jitter": 0.05}, seed=1)
    assert (ps.n, ps.d, ps.n_classes) == (600, 2, 2)
    r = np.linalg.norm(ps.points, axis=1)
    assert abs(np.median(r[ps.labels == 0]) - 1) < 0.05
    assert abs(np.median(r[ps.labels == 1]) - 3) < 0.05


def test_blobs_example():
    ps = generate("blobs", {"centers": [[0, 0], [10, 0], [0, 10]], "n_per": 100, "spread": 0.5}, seed=7)
    assert ps.n == 300 and ps.n_classes == 3


@pytest.mark.parametrize("shape", sorted(DEFAULTS))
def test_generators_deterministic(shape):
    a, b = generate(shape, seed=1), generate(shape, seed=1)
    assert np.array_equal(a.points, b.points)
    assert np.array_equal(a.labels, b.labels)
    assert not np.array_equal(a.points, generate(shape, seed=2).points)


def test_generator_errors():
    with pytest.raises(DataError):
        generate("spiral")
    with pytest.raises(DataError):
        generate("rings", {"radius": [1]})
    with pytest.raises(DataError):
        generate("rings", {"counts": [10, 10], "radii": [1, 1]})
    with pytest.raises(DataError):
        generate("lines", {"counts": [0, 5]})


def test_noise_counts():
    base = generate("blobs", {"n_per": 25, "centers": [[0, 0], [5, 5], [9, 0], [0, 9]]}, seed=0)
    assert base.n == 100
    noisy = inject_noise(base, 0.3, seed=4)
    assert noisy.n == 130
    assert np.sum(noisy.labels == noisy.noise_label) == 30
    assert noisy.noise_label == 4
    big = inject_noise(generate("rings", seed=0), 0.5, seed=0)
    assert big.n == 900


def test_noise_inside_enlarged_box():
    base = generate("lines", seed=0)
    noisy = inject_noise(base, 0.5, seed=9)
    lo, hi = base.points.min(axis=0), base.points.max(axis=0)
    margin = 0.05 * (hi - lo)
    extra = noisy.points[base.n:]
    assert np.all(extra >= lo - margin) and np.all(extra <= hi + margin)
    # structure points untouched
    assert np.array_equal(noisy.points[: base.n], base.points)


def test_noise_deterministic_and_errors():
    base = generate("lines", seed=0)
    a, b = inject_noise(base, 0.2, seed=5), inject_noise(base, 0.2, seed=5)
    assert np.array_equal(a.points, b.points)
    with pytest.raises(DataError):
        inject_noise(base, 0.0)
    with pytest.raises(DataError):
        inject_noise(base, 1.5)
    with pytest.raises(DataError):
        inject_noise(PointSet([[0.0, 0.0]]), 0.5)


def test_noise_on_unlabeled_input():
    noisy = inject_noise(PointSet(np.arange(20.0).reshape(10, 2)), 0.3, seed=0)
    assert noisy.labels.tolist() == [0] * 10 + [1] * 3


def test_standardize():
    ps = PointSet([[1.0, 5.0], [3.0, 5.0], [5.0, 5.0]])
    z = standardize(ps).points
    assert np.allclose(z.mean(axis=0), 0)
    assert math.isclose(z[:, 0].std(), 1.0)
    assert np.all(z[:, 1] == 0)
