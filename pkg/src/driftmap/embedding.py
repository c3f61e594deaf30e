"""Per-sample latent representation and its statistical summaries.

A sample is embedded as the grid-shaped matrix of Euclidean distances to
every neuron weight. The matrix is reduced to its first four moments; the
mean (m1) is the univariate monitoring statistic, and a chunk of samples is
summarized by a Gaussian fit of the per-sample statistics.
"""

import csv
from dataclasses import dataclass

import numpy as np

from driftmap import kernels

# below this, a value spread is treated as zero and m3/m4 are 0 by convention
ZERO_VARIANCE_EPS = 1e-12
# lower bound on a chunk's fitted variance so the Gaussian divergence never
# divides by zero on degenerate chunks
VARIANCE_FLOOR = 1e-12


@dataclass(frozen=True)
class MomentVector:
    """First four moments: mean, population variance, skewness, kurtosis
    (raw standardized fourth moment, not excess)."""

    m1: float
    m2: float
    m3: float
    m4: float

    def as_tuple(self):
        return (self.m1, self.m2, self.m3, self.m4)


@dataclass(frozen=True)
class GaussianSummary:
    """Gaussian fit (mean, floored variance, count) of a chunk's statistics."""

    mu: float
    var: float
    n: int


def distance_matrix(fmap, x):
    """Distances from x to every neuron weight, shaped (rows, cols)."""
    x = fmap._check_sample(x)
    flat = kernels.pairwise_distances(x[None, :], fmap.weights)[0]
    return flat.reshape(fmap.grid.rows, fmap.grid.cols)


def compute_moments(values):
    """Moments of a finite value sequence (population denominators)."""
    values = np.asarray(values, dtype=np.float64).ravel()
    if values.size == 0:
        raise ValueError("cannot compute moments of an empty sequence")
    m1 = float(values.mean())
    centered = values - m1
    m2 = float(np.mean(centered ** 2))
    if m2 < ZERO_VARIANCE_EPS:
        return MomentVector(m1, m2, 0.0, 0.0)
    m3 = float(np.mean(centered ** 3) / m2 ** 1.5)
    m4 = float(np.mean(centered ** 4) / m2 ** 2)
    return MomentVector(m1, m2, m3, m4)


def sample_statistic(fmap, x):
    """Monitoring statistic for one sample: the mean entry of its distance
    matrix."""
    x = fmap._check_sample(x)
    return float(kernels.pairwise_distances(x[None, :], fmap.weights).mean())


def sample_statistics(fmap, xs):
    """Vectorized sample_statistic over the rows of xs."""
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[1] != fmap.input_dim:
        raise ValueError("samples must be 2-d and match the map dimension")
    return kernels.pairwise_distances(xs, fmap.weights).mean(axis=1)


def sample_moments(fmap, xs):
    """Per-sample MomentVector of the distance matrix, one per row of xs."""
    xs = np.asarray(xs, dtype=np.float64)
    dists = kernels.pairwise_distances(xs, fmap.weights)
    return [compute_moments(row) for row in dists]


def chunk_summary(fmap, chunk):
    """Gaussian fit of the per-sample statistics of one chunk.

    Uses the unbiased (n-1) variance with a small floor; requires at least
    two samples.
    """
    samples = np.asarray(chunk.samples, dtype=np.float64)
    if samples.shape[0] < 2:
        raise ValueError("chunk must hold at least 2 samples")
    stats = sample_statistics(fmap, samples)
    var = float(stats.var(ddof=1))
    return GaussianSummary(mu=float(stats.mean()), var=max(var, VARIANCE_FLOOR), n=int(stats.size))


def chunk_moment_row(fmap, chunk):
    """Chunk-level moment diagnostics: the mean over samples of the
    per-sample moment vectors."""
    moments = np.array([m.as_tuple() for m in sample_moments(fmap, chunk.samples)])
    return MomentVector(*moments.mean(axis=0))


def write_moments_csv(path, rows):
    """Write (chunk_index, MomentVector) pairs as csv for offline plotting."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["chunk_index", "m1", "m2", "m3", "m4"])
        for chunk_index, mv in rows:
            writer.writerow([chunk_index, repr(mv.m1), repr(mv.m2), repr(mv.m3), repr(mv.m4)])
