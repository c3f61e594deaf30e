"""The continual-learning monitor.

Each chunk is summarized as a Gaussian over the per-sample map statistics and
scored against the previous chunk with the closed-form Gaussian divergence.
A score is flagged when it leaves mean +/- alpha * std of the most recent
window of scores; on a flag the map weights are retrained on the flagged
chunk and the score window restarts.
"""

import csv
import json
from collections import deque, namedtuple
from dataclasses import dataclass

import numpy as np

from driftmap import kernels
from driftmap.divergence import kl_gaussian
from driftmap.embedding import chunk_moment_row, chunk_summary

STD_FLOOR = 1e-12

STATISTICS = ("m1",)

SignalRow = namedtuple("SignalRow", ["chunk_index", "score", "lower", "upper", "shift"])


@dataclass
class DetectorConfig:
    """Decision-rule and continual-update parameters."""

    alpha: float = 5.0
    window: int = 8
    chunk_size: int = 200
    cl_eta: float = 0.1
    cl_epochs: int = 1
    statistic: str = "m1"

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise ValueError("alpha must be positive")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.chunk_size < 2:
            raise ValueError("chunk_size must be >= 2")
        if self.cl_eta < 0.0 or self.cl_eta > 1.0:
            raise ValueError("cl_eta must be in [0, 1]")
        if self.cl_epochs < 1:
            raise ValueError("cl_epochs must be >= 1")
        if self.statistic not in STATISTICS:
            raise ValueError(f"unknown statistic {self.statistic!r}")


@dataclass(frozen=True)
class ShiftEvent:
    """A flagged chunk: its score fell outside the recorded bounds."""

    chunk_index: int
    score: float
    lower: float
    upper: float
    action: str = "weights_updated"


class MonitorSignal:
    """Time-indexed divergence scores with their decision bounds."""

    def __init__(self):
        self.rows = []

    def append(self, row):
        self.rows.append(row)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    def scores(self):
        return np.array([r.score for r in self.rows])


def decide(recent_scores, current, alpha):
    """True iff current lies outside mean +/- alpha * std of recent_scores.

    Uses the (n-1)-denominator std with a floor so a window of identical
    scores still yields a nonempty interval.
    """
    recent = np.asarray(recent_scores, dtype=np.float64)
    if recent.size == 0:
        raise ValueError("decision window must be nonempty")
    lower, upper = _decision_bounds(recent, alpha)
    return not (lower <= current <= upper)


def _decision_bounds(recent_scores, alpha):
    recent = np.asarray(recent_scores, dtype=np.float64)
    mean = float(recent.mean())
    std = float(recent.std(ddof=1)) if recent.size > 1 else 0.0
    std = max(std, STD_FLOOR)
    return mean - alpha * std, mean + alpha * std


def score_sequence_decisions(scores, alpha, window):
    """Apply the decision rule over a plain score sequence.

    Same warm-up and restart-on-flag policy as the monitor, minus the weight
    updates. Returns one (lower, upper, flag) triple per score.
    """
    rows = []
    win = deque(maxlen=window)
    for score in scores:
        if len(win) == window:
            lower, upper = _decision_bounds(win, alpha)
            flag = not (lower <= score <= upper)
        else:
            lower, upper = -np.inf, np.inf
            flag = False
        if flag:
            win.clear()
        win.append(score)
        rows.append((lower, upper, flag))
    return rows


def cl_update(fmap, chunk, sched, cl_eta, cl_epochs, seed):
    """Continual-learning step: retrain the map on one chunk.

    Runs cl_epochs seeded-shuffled passes with constant learning rate cl_eta
    and constant radius sigma_end from the original schedule.
    """
    samples = np.ascontiguousarray(chunk.samples, dtype=np.float64)
    if samples.shape[0] == 0:
        raise ValueError("cannot update on an empty chunk")
    if cl_eta == 0.0:
        return fmap
    rng = np.random.default_rng(seed)
    n = samples.shape[0]
    etas = np.full(n, float(cl_eta))
    sigmas = np.full(n, float(sched.sigma_end))
    for _ in range(cl_epochs):
        order = rng.permutation(n)
        kernels.train_epoch(
            fmap.weights, np.ascontiguousarray(samples[order]), fmap.grid_dist,
            etas, sigmas, fmap.kind == "sim", sched._neigh_code,
            sched.dog_ratio, sched.dog_amplitude,
        )
    return fmap


class DriftMonitor:
    """Sequential monitor state: trained map, previous chunk summary, and the
    sliding score window.

    The first chunk only primes the reference summary. Decisions start once
    the window holds config.window scores; after a shift the window restarts
    with the flagged score as its first element. The map passed in is
    mutated by continual updates.
    """

    def __init__(self, fmap, config, sched, seed=0, collect_moments=False):
        self.fmap = fmap
        self.config = config
        self.sched = sched
        self.prev_summary = None
        self.window = deque(maxlen=config.window)
        self.signal = MonitorSignal()
        self.events = []
        self.collect_moments = collect_moments
        self.moment_rows = []
        self._seed = seed
        self._n_updates = 0

    def _next_update_seed(self):
        seq = np.random.SeedSequence(self._seed, spawn_key=(self._n_updates,))
        self._n_updates += 1
        return int(seq.generate_state(1)[0])

    def step(self, chunk):
        """Process one chunk; returns (score or None, ShiftEvent or None)."""
        curr = chunk_summary(self.fmap, chunk)
        if self.collect_moments:
            self.moment_rows.append((chunk.index, chunk_moment_row(self.fmap, chunk)))
        if self.prev_summary is None:
            self.prev_summary = curr
            return None, None

        score = kl_gaussian(self.prev_summary, curr)
        event = None
        if len(self.window) == self.config.window:
            lower, upper = _decision_bounds(self.window, self.config.alpha)
            shifted = not (lower <= score <= upper)
        else:
            lower, upper = -np.inf, np.inf
            shifted = False

        if shifted:
            event = ShiftEvent(chunk.index, score, lower, upper)
            self.events.append(event)
            cl_update(self.fmap, chunk, self.sched, self.config.cl_eta,
                      self.config.cl_epochs, self._next_update_seed())
            self.window.clear()

        self.window.append(score)
        self.signal.append(SignalRow(chunk.index, score, lower, upper, shifted))
        self.prev_summary = curr
        return score, event


def run_monitor(chunks, fmap, config, sched, seed=0):
    """Fold the monitor over a chunk stream.

    Returns (MonitorSignal, [ShiftEvent]). Deterministic given inputs and
    seed; fmap is mutated in place by continual updates.
    """
    monitor = DriftMonitor(fmap, config, sched, seed)
    for chunk in chunks:
        monitor.step(chunk)
    return monitor.signal, monitor.events


def write_signal_csv(path, signal):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["chunk_index", "score", "lower", "upper", "shift"])
        for row in signal:
            writer.writerow([row.chunk_index, repr(row.score), repr(row.lower),
                             repr(row.upper), int(row.shift)])


def read_signal_csv(path):
    signal = MonitorSignal()
    with open(path, "r", newline="") as fh:
        reader = csv.DictReader(fh)
        for rec in reader:
            signal.append(SignalRow(int(rec["chunk_index"]), float(rec["score"]),
                                    float(rec["lower"]), float(rec["upper"]),
                                    bool(int(rec["shift"]))))
    return signal


def write_events_jsonl(path, events):
    with open(path, "w") as fh:
        for ev in events:
            fh.write(json.dumps({"chunk_index": ev.chunk_index, "score": ev.score,
                                 "lower": ev.lower, "upper": ev.upper}))
            fh.write("\n")


def read_events_jsonl(path):
    events = []
    with open(path, "r") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            events.append(ShiftEvent(int(rec["chunk_index"]), float(rec["score"]),
                                     float(rec["lower"]), float(rec["upper"])))
    return events
