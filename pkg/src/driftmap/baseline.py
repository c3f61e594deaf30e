"""Linear-projection comparison pipeline.

PCA is fit on the training window by power iteration with deflation; each
monitored chunk is projected onto the components and consecutive chunks are
compared per component with a shared-grid cumulative-histogram distance and
the exact two-sample Kolmogorov-Smirnov statistic (max over components).
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class PcaModel:
    """Centering vector, orthonormal components (k, p), and the descending
    eigenvalues of the sample covariance."""

    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray


def fit_pca(data, k, max_iters=500, tol=1e-9, seed=0):
    """Leading k principal directions via power iteration with deflation.

    Each iterate is re-orthogonalized against the accepted components, so
    accumulated deflation error cannot leak earlier directions back in.
    Raises when k exceeds the effective rank of the centered data.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] < 2:
        raise ValueError("need at least 2 data rows")
    n, p = data.shape
    if not 1 <= k <= p:
        raise ValueError("k must be in [1, n_features]")
    if n < k:
        raise ValueError("need at least k data rows")

    mean = data.mean(axis=0)
    centered = data - mean
    cov = centered.T @ centered / (n - 1)
    total_scale = float(np.trace(cov))
    if total_scale <= 0.0:
        raise ValueError("data has zero variance; k exceeds rank")

    rng = np.random.default_rng(seed)
    components = np.zeros((k, p))
    eigenvalues = np.zeros(k)
    for comp in range(k):
        v = rng.standard_normal(p)
        v /= np.linalg.norm(v)
        for _ in range(max_iters):
            w = cov @ v
            if comp:
                w -= components[:comp].T @ (components[:comp] @ w)
            norm = np.linalg.norm(w)
            if norm <= total_scale * 1e-14:
                raise ValueError(f"k={k} exceeds the effective rank of the data")
            w /= norm
            if np.linalg.norm(w - v * np.sign(v @ w)) < tol:
                v = w
                break
            v = w
        lam = float(v @ cov @ v)
        if lam <= total_scale * 1e-12:
            raise ValueError(f"k={k} exceeds the effective rank of the data")
        # fix sign so the dominant coordinate is positive (determinism aid)
        v = v * np.sign(v[np.argmax(np.abs(v))])
        components[comp] = v
        eigenvalues[comp] = lam
        cov = cov - lam * np.outer(v, v)

    order = np.argsort(-eigenvalues)
    return PcaModel(mean, components[order], eigenvalues[order])


def project(model, samples):
    """Project rows onto the components; output shape (n, k)."""
    samples = np.asarray(samples, dtype=np.float64)
    single = samples.ndim == 1
    if single:
        samples = samples[None, :]
    if samples.shape[1] != model.mean.shape[0]:
        raise ValueError("sample dimension does not match the model")
    latent = (samples - model.mean) @ model.components.T
    return latent[0] if single else latent


def cumulative_hist_distance(latent_a, latent_b, n_bins=100):
    """Max over components of the sup-difference between empirical CDFs
    evaluated on a shared bin grid spanning the pooled range."""
    a = np.atleast_2d(np.asarray(latent_a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(latent_b, dtype=np.float64))
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise ValueError("chunks must be nonempty")
    if a.shape[1] != b.shape[1]:
        raise ValueError("latent dimensions differ")
    worst = 0.0
    for j in range(a.shape[1]):
        lo = min(a[:, j].min(), b[:, j].min())
        hi = max(a[:, j].max(), b[:, j].max())
        if hi == lo:
            continue
        edges = np.linspace(lo, hi, n_bins + 1)
        cdf_a = np.histogram(a[:, j], bins=edges)[0].cumsum() / a.shape[0]
        cdf_b = np.histogram(b[:, j], bins=edges)[0].cumsum() / b.shape[0]
        worst = max(worst, float(np.abs(cdf_a - cdf_b).max()))
    return worst


def ks_statistic(sample_a, sample_b):
    """Exact two-sample Kolmogorov-Smirnov statistic (1-d)."""
    a = np.sort(np.asarray(sample_a, dtype=np.float64).ravel())
    b = np.sort(np.asarray(sample_b, dtype=np.float64).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("samples must be nonempty")
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.abs(cdf_a - cdf_b).max())


def ks_statistic_multi(latent_a, latent_b):
    """Max over components of the per-component KS statistic."""
    a = np.atleast_2d(np.asarray(latent_a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(latent_b, dtype=np.float64))
    if a.shape[1] != b.shape[1]:
        raise ValueError("latent dimensions differ")
    return max(ks_statistic(a[:, j], b[:, j]) for j in range(a.shape[1]))


def baseline_signals(model, chunks, n_bins=100):
    """Per-consecutive-pair scores in the latent space.

    Returns a list of (chunk_index, hist_distance, ks_statistic), one entry
    per chunk after the first.
    """
    rows = []
    prev_latent = None
    for chunk in chunks:
        latent = project(model, chunk.samples)
        if prev_latent is not None:
            rows.append((chunk.index,
                         cumulative_hist_distance(prev_latent, latent, n_bins),
                         ks_statistic_multi(prev_latent, latent)))
        prev_latent = latent
    return rows
