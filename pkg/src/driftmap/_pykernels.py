"""Pure-NumPy kernels, used when the compiled extension is unavailable.

Function-for-function mirror of ``driftmap._core``; semantics must stay
identical (winner ties resolve to the lowest flat index, SIM steps use the
winner weight captured before any update in the step).
"""

import numpy as np

BACKEND = "python"

NEIGH_GAUSSIAN = 0
NEIGH_DOG = 1

# samples per block when forming (block, n_neurons, dim) difference tensors
_BLOCK = 64


def pairwise_distances(xs, weights):
    """Euclidean distances, shape (n_samples, n_neurons)."""
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    m = xs.shape[0]
    out = np.empty((m, weights.shape[0]))
    for start in range(0, m, _BLOCK):
        blk = xs[start:start + _BLOCK]
        diff = blk[:, None, :] - weights[None, :, :]
        out[start:start + _BLOCK] = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    return out


def winner_indices(xs, weights):
    """Flat index of the closest neuron per sample; ties -> lowest index."""
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    out = np.empty(xs.shape[0], dtype=np.intp)
    for start in range(0, xs.shape[0], _BLOCK):
        blk = xs[start:start + _BLOCK]
        diff = blk[:, None, :] - weights[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        out[start:start + _BLOCK] = np.argmin(d2, axis=1)
    return out


def _neigh(z, sigma, kind, dog_ratio, dog_amplitude):
    h = np.exp(-z / (2.0 * sigma * sigma))
    if kind == NEIGH_DOG:
        rs = dog_ratio * sigma
        h = h - dog_amplitude * np.exp(-z / (2.0 * rs * rs))
    return h


def train_epoch(weights, samples, grid_dist, etas, sigmas,
                hebbian, neigh_kind, dog_ratio, dog_amplitude):
    """One sequential pass over ``samples``, updating ``weights`` in place.

    ``etas`` and ``sigmas`` give the decayed learning rate and radius per
    presentation. ``hebbian`` selects the scale-invariant rule (all deltas
    parallel to x - w_winner) over the classic one.
    """
    for t in range(samples.shape[0]):
        x = samples[t]
        diff = weights - x
        d2 = np.einsum("ij,ij->i", diff, diff)
        win = int(np.argmin(d2))
        h = _neigh(grid_dist[win], sigmas[t], neigh_kind, dog_ratio, dog_amplitude)
        step = (etas[t] * h)[:, None]
        if hebbian:
            weights += step * (x - weights[win])
        else:
            weights += step * (x - weights)
