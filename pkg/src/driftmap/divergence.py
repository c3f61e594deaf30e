"""Kullback-Leibler divergence: the generic discrete form and the closed
Gaussian form used by the monitor. Natural logarithm throughout."""

from dataclasses import dataclass

import numpy as np

# replaces empty reference bins so the discrete form stays defined on
# empirical histograms
SMOOTHING_EPS = 1e-10


@dataclass(frozen=True)
class DiscretePmf:
    """A finite pmf: ordered support labels and their probabilities."""

    support: tuple
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "support", tuple(self.support))
        if len(self.support) != probs.size:
            raise ValueError("support and probs must have equal length")
        if np.any(probs < 0.0):
            raise ValueError("probabilities must be nonnegative")
        if abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError("probabilities must sum to 1 within 1e-9")


def _align(p, q):
    if p.support == q.support:
        return q.probs
    if set(p.support) != set(q.support):
        raise ValueError("pmf supports differ")
    index = {label: i for i, label in enumerate(q.support)}
    return q.probs[[index[label] for label in p.support]]


def kl_discrete(p, q):
    """sum_s p(s) log(p(s)/q(s)) over the shared support.

    Terms with p(s) = 0 contribute nothing. Zero q-bins opposing positive
    p-mass are replaced by SMOOTHING_EPS and q is renormalized.
    """
    q_probs = _align(p, q)
    if np.any((q_probs == 0.0) & (p.probs > 0.0)):
        q_probs = np.where(q_probs == 0.0, SMOOTHING_EPS, q_probs)
        q_probs = q_probs / q_probs.sum()
    mask = p.probs > 0.0
    pm = p.probs[mask]
    return float(np.sum(pm * np.log(pm / q_probs[mask])))


def kl_gaussian(p, q):
    """Closed-form divergence between two Gaussian summaries.

    Equals log(sigma_q/sigma_p) + (sigma_p^2 + (mu_p - mu_q)^2)/(2 sigma_q^2)
    - 1/2; rearranged so the result is nonnegative even when p and q nearly
    coincide.
    """
    if p.var <= 0.0 or q.var <= 0.0:
        raise ValueError("variances must be positive")
    excess = p.var / q.var - 1.0
    mean_term = (p.mu - q.mu) ** 2 / (2.0 * q.var)
    return float(0.5 * (excess - np.log1p(excess)) + mean_term)
