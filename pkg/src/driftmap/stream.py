"""Chunked data ingestion and synthetic drift-stream generation.

Streams are sequences of fixed-size chunks. The generator draws from
per-regime Gaussian sources and injects sudden or incremental transitions at
known chunk indices, so detection quality can be scored against exact ground
truth.
"""

from dataclasses import dataclass, field

import numpy as np

TRANSITIONS = ("sudden", "incremental")


@dataclass(frozen=True)
class Chunk:
    """An ordered batch of samples; the unit of monitoring."""

    index: int
    samples: np.ndarray


@dataclass(frozen=True)
class GroundTruth:
    """Sorted chunk indices where the generating distribution changes."""

    shift_chunks: tuple

    def __post_init__(self):
        object.__setattr__(self, "shift_chunks", tuple(int(i) for i in self.shift_chunks))

    def __iter__(self):
        return iter(self.shift_chunks)

    def __len__(self):
        return len(self.shift_chunks)


@dataclass(frozen=True)
class Regime:
    """One stationary Gaussian source: per-feature means/stds and a duration
    in chunks."""

    mean: np.ndarray
    std: np.ndarray
    duration: int


@dataclass
class StreamSpec:
    """Recipe for a synthetic stream with labeled shifts."""

    n_features: int
    chunk_size: int
    regimes: list
    transition: str = "sudden"
    blend_chunks: int = 1
    seed: int = 0
    n_chunks: int = field(init=False)

    def __post_init__(self):
        if self.n_features < 1:
            raise ValueError("n_features must be >= 1")
        if self.chunk_size < 2:
            raise ValueError("chunk_size must be >= 2")
        if self.transition not in TRANSITIONS:
            raise ValueError(f"unknown transition {self.transition!r}")
        if self.blend_chunks < 1:
            raise ValueError("blend_chunks must be >= 1")
        if not self.regimes:
            raise ValueError("at least one regime is required")
        regimes = []
        for reg in self.regimes:
            mean = np.broadcast_to(np.asarray(reg.mean, dtype=np.float64), (self.n_features,)).copy()
            std = np.broadcast_to(np.asarray(reg.std, dtype=np.float64), (self.n_features,)).copy()
            if np.any(std < 0.0):
                raise ValueError("regime stds must be nonnegative")
            if reg.duration < 1:
                raise ValueError("regime durations must be >= 1 chunk")
            regimes.append(Regime(mean, std, int(reg.duration)))
        self.regimes = regimes
        self.n_chunks = sum(r.duration for r in regimes)


def generate_stream(spec):
    """Seeded chunk iterator plus the ground-truth shift indices.

    Sudden transitions switch sources at regime boundaries. Incremental
    transitions draw each sample of the first blend_chunks chunks after a
    boundary from the new source with probability (j + 1)/(blend_chunks + 1)
    for blend offset j, then fully from the new source.
    """
    boundaries = np.cumsum([r.duration for r in spec.regimes])[:-1]
    truth = GroundTruth(tuple(boundaries))

    def chunks():
        rng = np.random.default_rng(spec.seed)
        regime_of = np.repeat(np.arange(len(spec.regimes)), [r.duration for r in spec.regimes])
        starts = np.concatenate([[0], boundaries])
        for index in range(spec.n_chunks):
            r = int(regime_of[index])
            reg = spec.regimes[r]
            samples = rng.normal(reg.mean, reg.std, size=(spec.chunk_size, spec.n_features))
            if spec.transition == "incremental" and r > 0:
                offset = index - int(starts[r])
                if offset < spec.blend_chunks:
                    frac_new = (offset + 1) / (spec.blend_chunks + 1)
                    old = spec.regimes[r - 1]
                    old_samples = rng.normal(old.mean, old.std, size=(spec.chunk_size, spec.n_features))
                    keep_old = rng.random(spec.chunk_size) >= frac_new
                    samples[keep_old] = old_samples[keep_old]
            yield Chunk(index, samples)

    return chunks(), truth


def chunk_rows(rows, chunk_size, start_index=0):
    """Slice a row matrix into consecutive chunks; a trailing remainder is
    kept only if it has at least 2 rows."""
    n = rows.shape[0]
    index = start_index
    for start in range(0, n, chunk_size):
        block = rows[start:start + chunk_size]
        if block.shape[0] < 2:
            break
        yield Chunk(index, block)
        index += 1


def load_csv(path):
    """Numeric csv matrix with optional single header row (auto-detected)."""
    with open(path, "r") as fh:
        first = fh.readline()
        if not first.strip():
            raise ValueError(f"{path}: empty file")
        try:
            [float(cell) for cell in first.strip().split(",")]
            skip = 0
        except ValueError:
            skip = 1
    data = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2, dtype=np.float64)
    return data


def read_chunks(path, chunk_size, fmt="csv"):
    """Yield consecutive chunks of chunk_size rows from a csv file.

    The final partial chunk is dropped when it has fewer than 2 rows.
    """
    if fmt != "csv":
        raise ValueError(f"unsupported stream format {fmt!r}")
    if chunk_size < 2:
        raise ValueError("chunk_size must be >= 2")
    data = load_csv(path)
    return chunk_rows(data, chunk_size)


def interleave_datasets(path_a, path_b, period, chunk_size):
    """Alternate period-row blocks from two files into one chunked stream.

    Emits period rows from a, then period from b, and so on until either
    source is exhausted (the last block may be short). Ground truth marks
    every chunk containing an exchange point, chunk 0 excluded.
    """
    if period < 1:
        raise ValueError("period must be >= 1")
    a = load_csv(path_a)
    b = load_csv(path_b)
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"column mismatch: {a.shape[1]} vs {b.shape[1]}")

    blocks = []
    exchange_samples = []
    offsets = {0: 0, 1: 0}
    sources = {0: a, 1: b}
    current = 0
    emitted = 0
    while offsets[current] < sources[current].shape[0]:
        src = sources[current]
        block = src[offsets[current]:offsets[current] + period]
        offsets[current] += block.shape[0]
        if emitted > 0:
            exchange_samples.append(emitted)
        blocks.append(block)
        emitted += block.shape[0]
        if block.shape[0] < period:
            break
        current = 1 - current
    rows = np.concatenate(blocks, axis=0) if blocks else np.empty((0, a.shape[1]))

    n_full_chunks = rows.shape[0] // chunk_size
    kept = rows.shape[0] if rows.shape[0] - n_full_chunks * chunk_size >= 2 else n_full_chunks * chunk_size
    truth_idx = sorted({s // chunk_size for s in exchange_samples if s < kept and s // chunk_size >= 1})
    return chunk_rows(rows, chunk_size), GroundTruth(tuple(truth_idx))


def write_stream_csv(path, chunks):
    """Write chunk samples row by row; returns the number of chunks written."""
    count = 0
    with open(path, "w") as fh:
        for chunk in chunks:
            for row in chunk.samples:
                fh.write(",".join(repr(v) for v in row))
                fh.write("\n")
            count += 1
    return count


def write_truth(path, truth):
    with open(path, "w") as fh:
        for idx in truth:
            fh.write(f"{idx}\n")


def read_truth(path):
    with open(path, "r") as fh:
        return GroundTruth(tuple(int(line.strip()) for line in fh if line.strip()))
