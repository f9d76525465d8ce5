"""Alternatives, strict rankings and their Lehmer-code numbering.

A ranking over ``m`` alternatives is a tuple holding a permutation of
``range(m)``; position 0 is the most preferred alternative.  Rankings are
numbered lexicographically, which for ``m = 3`` gives::

    0 ABC   1 ACB   2 BAC   3 BCA   4 CAB   5 CBA

The same integer doubles as the computational-basis label of a
``qubits_for(m)``-bit register.  Only labels below ``m!`` are valid.
"""

from __future__ import annotations

import itertools
import math
import string
from functools import lru_cache

import numpy as np

from .exceptions import BoundError, InvalidLabelError, InvalidRankingError

MAX_CANDIDATES = 6

Ranking = tuple  # tuple[int, ...], a permutation of range(m)


def _check_m(m):
    if not isinstance(m, (int, np.integer)) or not 1 <= m <= MAX_CANDIDATES:
        raise BoundError(f"candidate count must be in [1, {MAX_CANDIDATES}], got {m!r}")


def labels(m):
    """Default single-letter labels ``("A", "B", ...)`` for ``m`` alternatives."""
    _check_m(m)
    return tuple(string.ascii_uppercase[:m])


def n_rankings(m):
    _check_m(m)
    return math.factorial(m)


def qubits_for(m):
    """Smallest ``q`` with ``2**q >= m!``."""
    return max(0, (n_rankings(m) - 1).bit_length())


@lru_cache(maxsize=None)
def enumerate_rankings(m):
    """All rankings over ``m`` alternatives, position ``i`` holding Lehmer index ``i``."""
    _check_m(m)
    return tuple(itertools.permutations(range(m)))


def _check_ranking(r):
    r = tuple(int(x) for x in r)
    m = len(r)
    _check_m(m)
    if sorted(r) != list(range(m)):
        raise InvalidRankingError(f"{r!r} is not a permutation of range({m})")
    return r


def lehmer_encode(r):
    """Lexicographic rank of the permutation ``r``."""
    r = _check_ranking(r)
    m = len(r)
    index = 0
    remaining = list(range(m))
    for pos, x in enumerate(r):
        k = remaining.index(x)
        index += k * math.factorial(m - 1 - pos)
        remaining.pop(k)
    return index


def lehmer_decode(i, m):
    """Inverse of :func:`lehmer_encode`.

    Raises :class:`InvalidLabelError` for ``i >= m!`` so that callers can
    apply their own invalid-label policy.
    """
    _check_m(m)
    i = int(i)
    if not 0 <= i < math.factorial(m):
        raise InvalidLabelError(f"index {i} does not encode a ranking of {m} alternatives")
    remaining = list(range(m))
    out = []
    for pos in range(m):
        f = math.factorial(m - 1 - pos)
        k, i = divmod(i, f)
        out.append(remaining.pop(k))
    return tuple(out)


def reverse_ranking(r):
    return _check_ranking(r)[::-1]


def prefers(r, a, b):
    """True iff alternative ``a`` is ranked above ``b`` in ``r``."""
    if a == b:
        raise ValueError("prefers() needs two distinct alternatives")
    r = tuple(r)
    return r.index(a) < r.index(b)


def ranking_str(r, names=None):
    """Concatenated labels, e.g. ``"ACB"``."""
    names = names or labels(len(r))
    return "".join(names[x] for x in r)


def parse_ranking(text, names=None):
    """Parse ``"ACB"`` back into ``(0, 2, 1)``."""
    names = names or labels(len(text))
    try:
        return _check_ranking(names.index(ch) for ch in text)
    except ValueError as exc:
        if isinstance(exc, InvalidRankingError):
            raise
        raise InvalidRankingError(f"cannot parse ranking {text!r}") from exc


@lru_cache(maxsize=None)
def position_table(m):
    """``pos[L, a]`` = position of alternative ``a`` in ranking number ``L``."""
    perms = np.array(enumerate_rankings(m), dtype=np.int64)
    pos = np.empty_like(perms)
    rows = np.arange(len(perms))[:, None]
    pos[rows, perms] = np.arange(m)[None, :]
    pos.setflags(write=False)
    return pos


@lru_cache(maxsize=None)
def pair_masks(m):
    """Boolean array ``mask[a, b, L]``: ``a`` above ``b`` in ranking ``L``.

    The diagonal ``mask[a, a, :]`` is all False.
    """
    pos = position_table(m)
    mask = pos.T[:, None, :] < pos.T[None, :, :]
    mask.setflags(write=False)
    return mask


@lru_cache(maxsize=None)
def reversal_permutation(m):
    """``rev[i]`` = Lehmer index of the reversal of ranking ``i``."""
    out = np.array([lehmer_encode(r[::-1]) for r in enumerate_rankings(m)], dtype=np.int64)
    out.setflags(write=False)
    return out


def relabel_permutation(perm):
    """Index map induced on rankings by renaming alternative ``a`` to ``perm[a]``.

    ``out[i]`` is the Lehmer index of ranking ``i`` after relabelling.
    """
    perm = _check_ranking(perm)
    m = len(perm)
    return np.array(
        [lehmer_encode(tuple(perm[x] for x in r)) for r in enumerate_rankings(m)],
        dtype=np.int64,
    )
