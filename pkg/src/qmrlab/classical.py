"""Classical reference: expected pairwise tallies and the probabilistic Condorcet winner."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import as_profile, m_from_size, pair_matrix

TIE_TOL = 1e-9


@dataclass(frozen=True)
class PairwiseTally:
    """``expected[a, b]`` is the expected number of voters ranking ``a`` above ``b``."""

    m: int
    n: int
    expected: np.ndarray

    def margin(self, a, b):
        return self.expected[a, b] - self.expected[b, a]


def pairwise_expectations(profile):
    profile = as_profile(profile)
    m = m_from_size(profile.shape[1])
    expected = sum(pair_matrix(row) for row in profile)
    return PairwiseTally(m, len(profile), expected)


def beats(tally, a, b):
    """Strict expected-majority win; margins within ``TIE_TOL`` count as ties."""
    return tally.expected[a, b] - tally.expected[b, a] > TIE_TOL


def condorcet_winner(tally):
    """The candidate beating all others, or ``None``."""
    for c in range(tally.m):
        if all(beats(tally, c, b) for b in range(tally.m) if b != c):
            return c
    return None


def classical_winner(profile):
    return condorcet_winner(pairwise_expectations(profile))
