"""Probability vectors over rankings and per-voter profiles.

A *ranking distribution* is a 1-D float array of length ``m!`` indexed by
Lehmer number.  A *profile* is a 2-D array of shape ``(n, m!)``, one row per
voter (the dephased single-voter states).
"""

from __future__ import annotations

import math

import numpy as np

from .exceptions import BoundError
from .preferences import MAX_CANDIDATES, lehmer_encode, pair_masks

NORM_TOL = 1e-9
CLAMP_TOL = 1e-12


def m_from_size(size):
    """Candidate count ``m`` with ``m! == size``."""
    for m in range(1, MAX_CANDIDATES + 1):
        if math.factorial(m) == size:
            return m
    raise BoundError(f"length {size} is not m! for any m <= {MAX_CANDIDATES}")


def as_distribution(probs, m=None):
    """Validate and normalise a ranking distribution.

    Entries in ``[-1e-12, 0)`` are clamped to zero; the sum must be within
    ``1e-9`` of one and is then renormalised exactly.
    """
    d = np.asarray(probs, dtype=float)
    if d.ndim != 1:
        raise ValueError(f"ranking distribution must be 1-D, got shape {d.shape}")
    mm = m_from_size(d.size)
    if m is not None and mm != m:
        raise BoundError(f"distribution has {d.size} entries, expected {math.factorial(m)}")
    if not np.all(np.isfinite(d)):
        raise ValueError("ranking distribution has non-finite entries")
    if d.min() < -CLAMP_TOL:
        raise ValueError(f"negative probability {d.min():.3g}")
    d = np.clip(d, 0.0, None)
    s = d.sum()
    if abs(s - 1.0) > NORM_TOL:
        raise ValueError(f"ranking distribution sums to {s!r}, not 1")
    return d / s


def as_profile(profile, m=None):
    """Validate a profile; returns a float array of shape ``(n, m!)``."""
    p = np.asarray(profile, dtype=float)
    if p.ndim != 2 or p.shape[0] < 1:
        raise ValueError(f"profile must be a non-empty 2-D array, got shape {p.shape}")
    return np.stack([as_distribution(row, m) for row in p])


def point_mass(ranking_or_index, m=None):
    """Distribution concentrated on one ranking (given as a tuple or as an index)."""
    if isinstance(ranking_or_index, (int, np.integer)):
        if m is None:
            raise ValueError("m is required when passing an index")
        index = int(ranking_or_index)
    else:
        m = len(ranking_or_index)
        index = lehmer_encode(ranking_or_index)
    d = np.zeros(math.factorial(m))
    d[index] = 1.0
    return d


def uniform(m):
    n = math.factorial(m)
    return np.full(n, 1.0 / n)


def deterministic_profile(indices, m):
    """Profile in which voter ``i`` puts full weight on ranking ``indices[i]``."""
    return np.stack([point_mass(int(i), m) for i in indices])


def pair_probability(d, a, b):
    """Probability mass of rankings placing ``a`` above ``b``."""
    if a == b:
        raise ValueError("pair_probability needs two distinct alternatives")
    d = np.asarray(d, dtype=float)
    m = m_from_size(d.size)
    return float(d[pair_masks(m)[a, b]].sum())


def pair_matrix(d):
    """``P[a, b]`` = :func:`pair_probability` for every ordered pair (diagonal 0)."""
    d = np.asarray(d, dtype=float)
    m = m_from_size(d.size)
    return pair_masks(m).astype(float) @ d
