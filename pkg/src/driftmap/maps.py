"""Topology-preserving maps: grid geometry, winner search, update rules,
neighborhood functions, and offline training.

Two map kinds are supported. The classic self-organizing map pulls every
neuron toward the sample, scaled by a lattice-neighborhood weight of the
winner. The scale-invariant map applies a Hebbian step in which every neuron
moves parallel to (x - w_winner), so the map responds to relative proportions
of the input rather than magnitude.
"""

from dataclasses import dataclass, field

import numpy as np

from driftmap import kernels

GRID_METRICS = ("manhattan", "euclidean", "chebyshev")
MAP_KINDS = ("som", "sim")
NEIGHBORHOOD_KINDS = ("gaussian", "dog")


@dataclass(frozen=True)
class GridSpec:
    """Lattice geometry: grid shape plus the metric between lattice positions."""

    rows: int
    cols: int
    grid_metric: str = "manhattan"

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid must have at least one row and one column")
        if self.grid_metric not in GRID_METRICS:
            raise ValueError(f"unknown grid metric {self.grid_metric!r}")

    @property
    def n_neurons(self):
        return self.rows * self.cols

    def positions(self):
        """Integer (row, col) lattice coordinates, row-major, shape (n, 2)."""
        rr, cc = np.meshgrid(np.arange(self.rows), np.arange(self.cols), indexing="ij")
        return np.stack([rr.ravel(), cc.ravel()], axis=1)

    def grid_distance(self, a, b):
        """Lattice distance between two (row, col) positions."""
        dr = abs(a[0] - b[0])
        dc = abs(a[1] - b[1])
        if self.grid_metric == "manhattan":
            return float(dr + dc)
        if self.grid_metric == "euclidean":
            return float(np.hypot(dr, dc))
        return float(max(dr, dc))

    def pairwise_grid_distances(self):
        """All-pairs lattice distances, shape (n, n), row-major neuron order."""
        pos = self.positions().astype(np.float64)
        delta = np.abs(pos[:, None, :] - pos[None, :, :])
        if self.grid_metric == "manhattan":
            return delta.sum(axis=2)
        if self.grid_metric == "euclidean":
            return np.sqrt((delta ** 2).sum(axis=2))
        return delta.max(axis=2)


@dataclass
class TrainSchedule:
    """Training hyperparameters with geometric decay of eta and sigma.

    Both rates interpolate as start * (end/start)**t_frac for t_frac in
    [0, 1]. eta may be 0 only as a constant schedule (geometric decay cannot
    reach zero from a positive start).
    """

    epochs: int = 10
    eta_start: float = 0.5
    eta_end: float = 0.05
    sigma_start: float = 5.0
    sigma_end: float = 0.5
    neighborhood: str = "gaussian"
    dog_ratio: float = 1.6
    dog_amplitude: float = 0.5

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not 0.0 <= self.eta_end <= self.eta_start <= 1.0:
            raise ValueError("need 0 <= eta_end <= eta_start <= 1")
        if self.eta_end == 0.0 and self.eta_start > 0.0:
            raise ValueError("eta_end = 0 requires eta_start = 0")
        if not 0.0 < self.sigma_end <= self.sigma_start:
            raise ValueError("need 0 < sigma_end <= sigma_start")
        if self.neighborhood not in NEIGHBORHOOD_KINDS:
            raise ValueError(f"unknown neighborhood {self.neighborhood!r}")
        if self.dog_ratio <= 0.0:
            raise ValueError("dog_ratio must be positive")
        if not 0.0 <= self.dog_amplitude <= 1.0:
            raise ValueError("dog_amplitude must be in [0, 1]")

    def eta_at(self, t_frac):
        if self.eta_start == 0.0:
            return 0.0
        return self.eta_start * (self.eta_end / self.eta_start) ** t_frac

    def sigma_at(self, t_frac):
        return self.sigma_start * (self.sigma_end / self.sigma_start) ** t_frac

    @property
    def _neigh_code(self):
        return kernels.NEIGH_DOG if self.neighborhood == "dog" else kernels.NEIGH_GAUSSIAN


@dataclass
class FeatureMap:
    """A trained (or in-training) map: grid geometry plus per-neuron weights.

    weights has shape (rows * cols, input_dim) in row-major neuron order;
    position (r, c) is flat index r * cols + c.
    """

    grid: GridSpec
    kind: str
    weights: np.ndarray
    _grid_dist: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in MAP_KINDS:
            raise ValueError(f"unknown map kind {self.kind!r}")
        self.weights = np.ascontiguousarray(self.weights, dtype=np.float64)
        if self.weights.ndim != 2 or self.weights.shape[0] != self.grid.n_neurons:
            raise ValueError("weights must have shape (rows * cols, input_dim)")
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite")

    @property
    def input_dim(self):
        return self.weights.shape[1]

    @property
    def grid_dist(self):
        if self._grid_dist is None:
            self._grid_dist = self.grid.pairwise_grid_distances()
        return self._grid_dist

    def position_of(self, flat_index):
        return divmod(int(flat_index), self.grid.cols)

    def flat_index(self, position):
        return int(position[0]) * self.grid.cols + int(position[1])

    def copy(self):
        return FeatureMap(self.grid, self.kind, self.weights.copy())

    def _check_sample(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.input_dim,):
            raise ValueError(f"sample has dimension {x.shape}, map expects ({self.input_dim},)")
        return x


def init_map(grid, kind, training_rows, seed):
    """Initialize neuron weights by sampling training rows with replacement.

    Keeps initial weights on the data manifold; deterministic for a fixed
    seed.
    """
    rows = np.asarray(training_rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[0] == 0:
        raise ValueError("training rows must be a nonempty 2-d collection")
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, rows.shape[0], size=grid.n_neurons)
    return FeatureMap(grid, kind, rows[picks].copy())


def find_winner(fmap, x):
    """Grid position of the neuron closest to x (Euclidean); ties break to the
    lowest row-major index."""
    x = fmap._check_sample(x)
    flat = int(kernels.winner_indices(x[None, :], fmap.weights)[0])
    return fmap.position_of(flat)


def neighborhood(z, sched, t_frac):
    """Lattice-distance weighting h(z) at schedule position t_frac.

    Gaussian: exp(-z / (2 sigma^2)). Difference-of-Gaussians subtracts a
    wider Gaussian of radius dog_ratio * sigma scaled by dog_amplitude.
    Note the lattice distance enters unsquared.
    """
    z = np.asarray(z, dtype=np.float64)
    sigma = sched.sigma_at(t_frac)
    h = np.exp(-z / (2.0 * sigma * sigma))
    if sched.neighborhood == "dog":
        wide = sched.dog_ratio * sigma
        h = h - sched.dog_amplitude * np.exp(-z / (2.0 * wide * wide))
    return h if h.ndim else float(h)


def _winner_grid_row(fmap, winner):
    return fmap.grid_dist[fmap.flat_index(winner)]


def som_update(fmap, x, winner, eta, sched, t_frac):
    """Classic update: every neuron moves toward x, scaled by eta * h."""
    x = fmap._check_sample(x)
    h = neighborhood(_winner_grid_row(fmap, winner), sched, t_frac)
    fmap.weights += (eta * h)[:, None] * (x - fmap.weights)
    return fmap


def sim_update(fmap, x, winner, eta, sched, t_frac):
    """Hebbian update: every neuron moves along (x - w_winner), with w_winner
    taken before any update in this step."""
    x = fmap._check_sample(x)
    h = neighborhood(_winner_grid_row(fmap, winner), sched, t_frac)
    direction = x - fmap.weights[fmap.flat_index(winner)]
    fmap.weights += (eta * h)[:, None] * direction
    return fmap


def _schedule_arrays(sched, n_total, offset, count):
    """Per-presentation eta and sigma for presentations offset..offset+count."""
    denom = max(n_total - 1, 1)
    t_frac = np.arange(offset, offset + count, dtype=np.float64) / denom
    if sched.eta_start == 0.0:
        etas = np.zeros(count)
    else:
        etas = sched.eta_start * (sched.eta_end / sched.eta_start) ** t_frac
    sigmas = sched.sigma_start * (sched.sigma_end / sched.sigma_start) ** t_frac
    return etas, sigmas


def train(fmap, data, sched, seed):
    """Offline training on an initial window.

    Runs sched.epochs seeded-shuffled passes over data, decaying eta and
    sigma over the total presentation count. Returns (map, error_history)
    where error_history holds the quantization error after each epoch.
    """
    data = np.ascontiguousarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] == 0:
        raise ValueError("training data must be a nonempty 2-d collection")
    if data.shape[1] != fmap.input_dim:
        raise ValueError("training data dimension does not match the map")
    rng = np.random.default_rng(seed)
    n = data.shape[0]
    total = sched.epochs * n
    hebbian = fmap.kind == "sim"
    history = []
    for epoch in range(sched.epochs):
        order = rng.permutation(n)
        etas, sigmas = _schedule_arrays(sched, total, epoch * n, n)
        kernels.train_epoch(
            fmap.weights, np.ascontiguousarray(data[order]), fmap.grid_dist,
            etas, sigmas, hebbian, sched._neigh_code,
            sched.dog_ratio, sched.dog_amplitude,
        )
        history.append(quantization_error(fmap, data))
    return fmap, history


def quantization_error(fmap, data):
    """Mean distance from each sample to its closest neuron."""
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] == 0:
        raise ValueError("data must be a nonempty 2-d collection")
    return float(kernels.pairwise_distances(data, fmap.weights).min(axis=1).mean())


def save_map(fmap, path):
    """Write the map to an .npz archive (lossless float64 round-trip)."""
    np.savez(
        path,
        weights=fmap.weights,
        rows=np.int64(fmap.grid.rows),
        cols=np.int64(fmap.grid.cols),
        grid_metric=np.str_(fmap.grid.grid_metric),
        kind=np.str_(fmap.kind),
    )


def load_map(path):
    with np.load(path) as archive:
        grid = GridSpec(
            rows=int(archive["rows"]),
            cols=int(archive["cols"]),
            grid_metric=str(archive["grid_metric"]),
        )
        return FeatureMap(grid, str(archive["kind"]), archive["weights"])
