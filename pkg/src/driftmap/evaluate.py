"""Detection-quality scoring and the alpha x window sensitivity grid."""

import csv
from dataclasses import dataclass, replace

import numpy as np

from driftmap.detector import run_monitor


@dataclass(frozen=True)
class DetectionReport:
    """Agreement scores between detected and true shift chunks."""

    kappa: float
    recall: float
    fpr: float
    mean_delay: float
    matched_pairs: tuple


def kappa(predicted, truth):
    """Cohen's kappa between two equal-length binary sequences.

    Returns 1.0 in the degenerate all-agree case where chance agreement is
    exactly 1.
    """
    predicted = np.asarray(predicted, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if predicted.shape != truth.shape or predicted.ndim != 1 or predicted.size == 0:
        raise ValueError("sequences must be 1-d, nonempty, and of equal length")
    p_obs = float(np.mean(predicted == truth))
    rate_p = float(predicted.mean())
    rate_t = float(truth.mean())
    p_exp = rate_p * rate_t + (1.0 - rate_p) * (1.0 - rate_t)
    if p_exp == 1.0:
        return 1.0 if p_obs == 1.0 else -1.0
    return (p_obs - p_exp) / (1.0 - p_exp)


def tolerant_align(detected, truth, tol):
    """Greedy nearest matching of detections to true shifts within +/- tol
    chunks; each side is matched at most once.

    Returns (matched_pairs, unmatched_detected) with pairs as
    (truth_index, detected_index).
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    detected = sorted(int(i) for i in detected)
    truth = sorted(int(i) for i in truth)
    candidates = sorted(
        (abs(t - d), t, d)
        for t in truth for d in detected
        if abs(t - d) <= tol
    )
    matched = {}
    used = set()
    for _, t, d in candidates:
        if t in matched or d in used:
            continue
        matched[t] = d
        used.add(d)
    pairs = tuple(sorted(matched.items()))
    unmatched = tuple(d for d in detected if d not in used)
    return pairs, unmatched


def aligned_binary(detected, truth, tol, n_chunks):
    """Binary per-chunk sequences for kappa: matched detections are placed at
    their truth position, unmatched ones stay where they fired."""
    pairs, unmatched = tolerant_align(detected, truth, tol)
    pred = np.zeros(n_chunks, dtype=np.int64)
    true = np.zeros(n_chunks, dtype=np.int64)
    for t in truth:
        true[t] = 1
    for t, _ in pairs:
        pred[t] = 1
    for d in unmatched:
        pred[d] = 1
    return pred, true


def detection_report(detected, truth, n_chunks, tol=1):
    """Score a detection run against ground truth.

    recall counts matched truths; fpr counts unmatched detections against
    the non-shift chunks; mean_delay is the mean absolute chunk offset of
    the matched pairs.
    """
    detected = sorted(int(i) for i in detected)
    truth = sorted(int(i) for i in truth)
    pairs, unmatched = tolerant_align(detected, truth, tol)
    pred, true = aligned_binary(detected, truth, tol, n_chunks)
    recall = len(pairs) / len(truth) if truth else 1.0
    negatives = n_chunks - len(truth)
    fpr = len(unmatched) / negatives if negatives > 0 else 0.0
    delay = float(np.mean([abs(d - t) for t, d in pairs])) if pairs else 0.0
    return DetectionReport(kappa(pred, true), recall, fpr, delay, pairs)


def grid_search(stream_factory, map_factory, alphas, windows, base_config,
                sched, truth, n_chunks, tol=1, seed=0):
    """Kappa over the decision-rule parameter grid.

    Every cell reruns the monitor on a fresh stream iterator and a fresh map
    copy so cells are comparable and independent. Returns a matrix of shape
    (len(alphas), len(windows)).
    """
    alphas = list(alphas)
    windows = list(windows)
    if not alphas or not windows:
        raise ValueError("alphas and windows must be nonempty")
    matrix = np.empty((len(alphas), len(windows)))
    for i, alpha in enumerate(alphas):
        for j, window in enumerate(windows):
            config = replace(base_config, alpha=float(alpha), window=int(window))
            _, events = run_monitor(stream_factory(), map_factory(), config, sched, seed)
            report = detection_report([e.chunk_index for e in events], truth,
                                      n_chunks, tol)
            matrix[i, j] = report.kappa
    return matrix


def write_kappa_matrix_csv(path, matrix, alphas, windows):
    """Matrix csv with a window-value header row and alpha-value row labels."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha/window"] + [repr(float(w)) for w in windows])
        for alpha, row in zip(alphas, np.asarray(matrix)):
            writer.writerow([repr(float(alpha))] + [repr(float(v)) for v in row])
