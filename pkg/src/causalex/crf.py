"""Linear-chain CRF over tag sequences.

Scores a path as the sum of adjacent-tag transition scores (with virtual
START/END tags, so the transition matrix has side k+2) plus per-token
emission scores.  The partition function and marginals use log-space
forward/backward recurrences; decoding is Viterbi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import LengthMismatch


@dataclass
class CrfGrads:
    emissions: np.ndarray  # (n, k)
    transitions: np.ndarray  # (k+2, k+2)


def _check(emissions: np.ndarray, transitions: np.ndarray,
           path: np.ndarray | None = None) -> tuple[int, int]:
    n, k = emissions.shape
    if transitions.shape != (k + 2, k + 2):
        raise LengthMismatch(
            f"transition matrix {transitions.shape} does not match {k} tags"
        )
    if path is not None and len(path) != n:
        raise LengthMismatch(f"path length {len(path)} != {n} tokens")
    return n, k


def start_index(k: int) -> int:
    return k


def end_index(k: int) -> int:
    return k + 1


def path_score(emissions: np.ndarray, transitions: np.ndarray,
               path: np.ndarray) -> float:
    """Score of one START-prefixed, END-suffixed tag path."""
    path = np.asarray(path, dtype=np.int64)
    n, k = _check(emissions, transitions, path)
    start, end = start_index(k), end_index(k)
    score = transitions[start, path[0]] + transitions[path[-1], end]
    score += transitions[path[:-1], path[1:]].sum()
    score += emissions[np.arange(n), path].sum()
    return float(score)


def _forward(emissions: np.ndarray, transitions: np.ndarray) -> np.ndarray:
    """Log-space forward messages alpha: (n, k)."""
    n, k = emissions.shape
    start = start_index(k)
    inner = transitions[:k, :k]
    alpha = np.empty((n, k))
    alpha[0] = transitions[start, :k] + emissions[0]
    for t in range(1, n):
        alpha[t] = emissions[t] + logsumexp(alpha[t - 1][:, None] + inner, axis=0)
    return alpha


def _backward(emissions: np.ndarray, transitions: np.ndarray) -> np.ndarray:
    """Log-space backward messages beta: (n, k)."""
    n, k = emissions.shape
    end = end_index(k)
    inner = transitions[:k, :k]
    beta = np.empty((n, k))
    beta[n - 1] = transitions[:k, end]
    for t in range(n - 2, -1, -1):
        beta[t] = logsumexp(inner + (emissions[t + 1] + beta[t + 1])[None, :], axis=1)
    return beta


def log_partition(emissions: np.ndarray, transitions: np.ndarray) -> float:
    """log sum over all k^n paths of exp(path score)."""
    n, k = _check(emissions, transitions)
    alpha = _forward(emissions, transitions)
    return float(logsumexp(alpha[n - 1] + transitions[:k, end_index(k)]))


def nll_and_grad(emissions: np.ndarray, transitions: np.ndarray,
                 path: np.ndarray) -> tuple[float, CrfGrads]:
    """Negative log-likelihood of ``path`` and its exact gradients.

    Gradients are marginal expectations minus gold indicator counts, from
    the forward-backward recurrences.
    """
    path = np.asarray(path, dtype=np.int64)
    n, k = _check(emissions, transitions, path)
    start, end = start_index(k), end_index(k)
    inner = transitions[:k, :k]

    alpha = _forward(emissions, transitions)
    beta = _backward(emissions, transitions)
    log_z = logsumexp(alpha[n - 1] + transitions[:k, end])

    loss = log_z - path_score(emissions, transitions, path)

    # Unary marginals P(y_t = j).
    unary = np.exp(alpha + beta - log_z)
    d_emissions = unary.copy()
    d_emissions[np.arange(n), path] -= 1.0

    d_trans = np.zeros_like(transitions)
    # Pairwise marginals P(y_t = i, y_{t+1} = j).
    for t in range(n - 1):
        log_pair = (
            alpha[t][:, None]
            + inner
            + (emissions[t + 1] + beta[t + 1])[None, :]
            - log_z
        )
        d_trans[:k, :k] += np.exp(log_pair)
        d_trans[path[t], path[t + 1]] -= 1.0
    # START and END transitions.
    d_trans[start, :k] += unary[0]
    d_trans[start, path[0]] -= 1.0
    d_trans[:k, end] += unary[n - 1]
    d_trans[path[-1], end] -= 1.0

    return float(loss), CrfGrads(emissions=d_emissions, transitions=d_trans)


def viterbi(emissions: np.ndarray, transitions: np.ndarray) -> np.ndarray:
    """Maximum-score path; ties resolve toward the lowest tag index."""
    n, k = _check(emissions, transitions)
    start, end = start_index(k), end_index(k)
    inner = transitions[:k, :k]

    score = transitions[start, :k] + emissions[0]
    backptr = np.zeros((n, k), dtype=np.int64)
    for t in range(1, n):
        candidates = score[:, None] + inner  # (from, to)
        backptr[t] = np.argmax(candidates, axis=0)
        score = candidates[backptr[t], np.arange(k)] + emissions[t]
    score = score + transitions[:k, end]

    path = np.empty(n, dtype=np.int64)
    path[n - 1] = int(np.argmax(score))
    for t in range(n - 1, 0, -1):
        path[t - 1] = backptr[t, path[t]]
    return path
