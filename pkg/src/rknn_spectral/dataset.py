"""Point sets: CSV ingestion, synthetic generators and noise injection."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class DataError(ValueError):
    """Raised for malformed input data, with row/column position when known."""

    def __init__(self, message, row=None, column=None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.row = row
        self.column = column


@dataclass(frozen=True)
class PointSet:
    points: np.ndarray
    labels: np.ndarray | None = None
    name: str = "points"
    # id carried by injected noise points, if any
    noise_label: int | None = field(default=None)

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DataError(f"points must be an N x d matrix with N, d >= 1, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            bad = np.argwhere(~np.isfinite(pts))[0]
            raise DataError("non-finite coordinate", row=int(bad[0]) + 1, column=int(bad[1]) + 1)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            lab = np.asarray(self.labels)
            if lab.ndim != 1 or lab.shape[0] != pts.shape[0]:
                raise DataError("labels must be a vector with one entry per point")
            if not np.issubdtype(lab.dtype, np.integer):
                if not np.all(np.equal(np.mod(lab, 1), 0)):
                    raise DataError("labels must be integers")
            lab = lab.astype(np.int64)
            used = np.unique(lab)
            if used[0] != 0 or used[-1] != used.size - 1:
                raise DataError("labels must use every id in 0..C-1")
            lab.setflags(write=False)
            object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def n_classes(self) -> int:
        return 0 if self.labels is None else int(self.labels.max()) + 1


def _parse_float(text):
    try:
        return float(text)
    except ValueError:
        return None


def load_csv(path, label_column=None, name=None) -> PointSet:
    """Read a comma-separated point file.

    A single header row is accepted and detected by a non-numeric feature
    cell in the first row. ``label_column`` is a 0-based column index; its
    values may be arbitrary strings and are re-encoded to contiguous ids in
    order of first appearance.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh)]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc

    numbered = [(i + 1, r) for i, r in enumerate(rows) if r and any(c.strip() for c in r)]
    if not numbered:
        raise DataError(f"{path} contains no data rows")

    width = len(numbered[0][1])
    if label_column is not None and not 0 <= label_column < width:
        raise DataError(f"label column {label_column} out of range for {width} columns")
    feature_cols = [c for c in range(width) if c != label_column]
    if not feature_cols:
        raise DataError("no feature columns")

    first_line, first = numbered[0]
    if any(_parse_float(first[c]) is None for c in feature_cols):
        numbered = numbered[1:]
        if not numbered:
            raise DataError(f"{path} has a header but no data rows")

    coords = np.empty((len(numbered), len(feature_cols)))
    raw_labels = []
    for r, (line_no, row) in enumerate(numbered):
        if len(row) != width:
            raise DataError(f"expected {width} cells, found {len(row)}", row=line_no)
        for out_c, c in enumerate(feature_cols):
            value = _parse_float(row[c])
            if value is None:
                raise DataError(f"non-numeric cell {row[c]!r}", row=line_no, column=c + 1)
            if not math.isfinite(value):
                raise DataError(f"non-finite value {row[c]!r}", row=line_no, column=c + 1)
            coords[r, out_c] = value
        if label_column is not None:
            raw_labels.append(row[label_column].strip())

    labels = None
    if label_column is not None:
        ids: dict[str, int] = {}
        labels = np.array([ids.setdefault(v, len(ids)) for v in raw_labels], dtype=np.int64)
    return PointSet(coords, labels, name=name or path.stem)


def save_csv(ps: PointSet, path) -> None:
    """Write coordinates (shortest round-trip repr) plus a trailing label column if present."""
    path = Path(path)
    header = [f"x{j}" for j in range(ps.d)]
    if ps.labels is not None:
        header.append("label")
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(ps.n):
            row = [repr(float(v)) for v in ps.points[i]]
            if ps.labels is not None:
                row.append(str(int(ps.labels[i])))
            w.writerow(row)


def standardize(ps: PointSet) -> PointSet:
    """Zero mean, unit variance per dimension; constant dimensions are only centered."""
    mean = ps.points.mean(axis=0)
    std = ps.points.std(axis=0)
    std[std == 0] = 1.0
    return PointSet((ps.points - mean) / std, ps.labels, ps.name, ps.noise_label)


# --------------------------------------------------------------------------
# synthetic data

SHAPES = ("rings", "lines", "blobs", "sparse_blobs")

DEFAULTS = {
    "rings": {"counts": [300, 300], "radii": [1.0, 3.0], "jitter": 0.05},
    "lines": {"counts": [200, 200, 200], "length": 4.0, "spacing": 1.0, "jitter": 0.02},
    "blobs": {"centers": [[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]], "n_per": 100, "spread": 0.5},
    "sparse_blobs": {
        "centers": [[0.0, 0.0], [6.0, 0.0], [3.0, 5.0]],
        "counts": [150, 100, 53],
        "spreads": [0.3, 0.8, 1.2],
    },
}


def _positive_counts(counts, what="counts"):
    counts = [int(c) for c in counts]
    if not counts or min(counts) < 1:
        raise DataError(f"{what} must all be >= 1")
    return counts


def _positive(value, what):
    value = float(value)
    if not value > 0:
        raise DataError(f"{what} must be > 0, got {value}")
    return value


def _rings(rng, counts, radii, jitter):
    counts = _positive_counts(counts)
    radii = [_positive(r, "radius") for r in radii]
    if len(radii) != len(counts):
        raise DataError("rings need one radius per count")
    if len(set(radii)) != len(radii):
        raise DataError("ring radii must be distinct")
    jitter = _positive(jitter, "jitter")
    pts, labels = [], []
    for label, (n, r) in enumerate(zip(counts, radii)):
        theta = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        ring = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        pts.append(ring + rng.normal(0.0, jitter, (n, 2)))
        labels.append(np.full(n, label))
    return np.vstack(pts), np.concatenate(labels)


def _lines(rng, counts, length, spacing, jitter):
    counts = _positive_counts(counts)
    length = _positive(length, "length")
    spacing = _positive(spacing, "spacing")
    jitter = _positive(jitter, "jitter")
    pts, labels = [], []
    for label, n in enumerate(counts):
        x = np.linspace(0.0, length, n)
        y = label * spacing + rng.normal(0.0, jitter, n)
        pts.append(np.column_stack([x, y]))
        labels.append(np.full(n, label))
    return np.vstack(pts), np.concatenate(labels)


def _blobs(rng, centers, counts, spreads):
    centers = np.asarray(centers, dtype=float)
    if centers.ndim != 2 or centers.shape[0] < 1:
        raise DataError("centers must be a non-empty list of coordinates")
    counts = _positive_counts(counts)
    spreads = [_positive(s, "spread") for s in spreads]
    if not len(counts) == len(spreads) == centers.shape[0]:
        raise DataError("need one count and one spread per center")
    pts, labels = [], []
    for label, (c, n, s) in enumerate(zip(centers, counts, spreads)):
        pts.append(c + rng.normal(0.0, s, (n, centers.shape[1])))
        labels.append(np.full(n, label))
    return np.vstack(pts), np.concatenate(labels)


def generate(shape: str, params: dict | None = None, seed: int = 0) -> PointSet:
    """Generate a labeled synthetic point set.

    Shapes and their parameters (missing keys fall back to ``DEFAULTS``):

    - ``rings``: ``counts``, ``radii``, ``jitter`` -- concentric noisy circles
    - ``lines``: ``counts``, ``length``, ``spacing``, ``jitter`` -- parallel segments
    - ``blobs``: ``centers``, ``n_per``, ``spread`` -- isotropic Gaussians
    - ``sparse_blobs``: ``centers``, ``counts``, ``spreads`` -- Gaussians of unequal density
    """
    if shape not in SHAPES:
        raise DataError(f"unknown shape {shape!r}; expected one of {', '.join(SHAPES)}")
    p = dict(DEFAULTS[shape])
    unknown = set(params or {}) - set(p)
    if unknown:
        raise DataError(f"unknown {shape} parameter(s): {', '.join(sorted(unknown))}")
    p.update(params or {})
    rng = np.random.default_rng(seed)

    if shape == "rings":
        pts, labels = _rings(rng, p["counts"], p["radii"], p["jitter"])
    elif shape == "lines":
        pts, labels = _lines(rng, p["counts"], p["length"], p["spacing"], p["jitter"])
    elif shape == "blobs":
        k = len(p["centers"])
        pts, labels = _blobs(rng, p["centers"], [p["n_per"]] * k, [p["spread"]] * k)
    else:
        pts, labels = _blobs(rng, p["centers"], p["counts"], p["spreads"])
    return PointSet(pts, labels, name=shape)


def inject_noise(ps: PointSet, fraction: float, seed: int = 0) -> PointSet:
    """Append floor(fraction * N) uniform points over the 10%-enlarged bounding box.

    Noise points receive a fresh label one past the existing ids (unlabeled
    inputs get label 0 for structure and 1 for noise).
    """
    if ps.n < 1:
        raise DataError("cannot add noise to an empty point set")
    if not 0 < fraction <= 1:
        raise DataError(f"noise fraction must be in (0, 1], got {fraction}")
    count = math.floor(fraction * ps.n)
    if count < 1:
        raise DataError(f"noise fraction {fraction} yields no points for N={ps.n}")

    lo = ps.points.min(axis=0)
    hi = ps.points.max(axis=0)
    extent = hi - lo
    margin = np.where(extent > 0, 0.05 * extent, 0.5)
    rng = np.random.default_rng(seed)
    noise = rng.uniform(lo - margin, hi + margin, size=(count, ps.d))

    base = ps.labels if ps.labels is not None else np.zeros(ps.n, dtype=np.int64)
    noise_id = int(base.max()) + 1
    labels = np.concatenate([base, np.full(count, noise_id)])
    return PointSet(np.vstack([ps.points, noise]), labels, f"{ps.name}+noise{fraction:g}", noise_id)
