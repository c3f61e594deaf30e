# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the hot paths: pairwise neuron distances, winner
search, and the sequential per-presentation training loop.

Must stay semantically identical to ``driftmap._pykernels``.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, sqrt

cnp.import_array()

BACKEND = "compiled"

NEIGH_GAUSSIAN = 0
NEIGH_DOG = 1


def pairwise_distances(object xs_in, object weights_in):
    """Euclidean distances, shape (n_samples, n_neurons)."""
    cdef double[:, ::1] xs = np.ascontiguousarray(xs_in, dtype=np.float64)
    cdef double[:, ::1] weights = np.ascontiguousarray(weights_in, dtype=np.float64)
    cdef Py_ssize_t m = xs.shape[0], n = weights.shape[0], p = xs.shape[1]
    out = np.empty((m, n))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, j, k
    cdef double acc, d
    for i in range(m):
        for j in range(n):
            acc = 0.0
            for k in range(p):
                d = xs[i, k] - weights[j, k]
                acc += d * d
            o[i, j] = sqrt(acc)
    return out


def winner_indices(object xs_in, object weights_in):
    """Flat index of the closest neuron per sample; ties -> lowest index."""
    cdef double[:, ::1] xs = np.ascontiguousarray(xs_in, dtype=np.float64)
    cdef double[:, ::1] weights = np.ascontiguousarray(weights_in, dtype=np.float64)
    cdef Py_ssize_t m = xs.shape[0], n = weights.shape[0], p = xs.shape[1]
    out = np.empty(m, dtype=np.intp)
    cdef Py_ssize_t[::1] o = out
    cdef Py_ssize_t i, j, k, win
    cdef double acc, d, best
    for i in range(m):
        best = -1.0
        win = 0
        for j in range(n):
            acc = 0.0
            for k in range(p):
                d = xs[i, k] - weights[j, k]
                acc += d * d
            if best < 0.0 or acc < best:
                best = acc
                win = j
        o[i] = win
    return out


def train_epoch(double[:, ::1] weights, double[:, ::1] samples,
                double[:, ::1] grid_dist, double[::1] etas, double[::1] sigmas,
                bint hebbian, int neigh_kind, double dog_ratio, double dog_amplitude):
    """One sequential pass over ``samples``, updating ``weights`` in place."""
    cdef Py_ssize_t n = weights.shape[0], p = weights.shape[1], T = samples.shape[0]
    cdef Py_ssize_t t, j, k, win
    cdef double acc, d, best, eta, denom, dog_denom, h, step
    direction_arr = np.empty(p)
    cdef double[::1] direction = direction_arr

    for t in range(T):
        best = -1.0
        win = 0
        for j in range(n):
            acc = 0.0
            for k in range(p):
                d = samples[t, k] - weights[j, k]
                acc += d * d
            if best < 0.0 or acc < best:
                best = acc
                win = j

        eta = etas[t]
        denom = 2.0 * sigmas[t] * sigmas[t]
        dog_denom = denom * dog_ratio * dog_ratio

        if hebbian:
            # winner weight captured before any update in this step
            for k in range(p):
                direction[k] = samples[t, k] - weights[win, k]
            for j in range(n):
                h = exp(-grid_dist[win, j] / denom)
                if neigh_kind == NEIGH_DOG:
                    h -= dog_amplitude * exp(-grid_dist[win, j] / dog_denom)
                step = eta * h
                for k in range(p):
                    weights[j, k] += step * direction[k]
        else:
            for j in range(n):
                h = exp(-grid_dist[win, j] / denom)
                if neigh_kind == NEIGH_DOG:
                    h -= dog_amplitude * exp(-grid_dist[win, j] / dog_denom)
                step = eta * h
                for k in range(p):
                    weights[j, k] += step * (samples[t, k] - weights[j, k])
