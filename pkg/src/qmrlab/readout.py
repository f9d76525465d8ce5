"""Qubit labels, independent bit-flip readout noise and invalid-label decoding.

A ranking with Lehmer index ``i`` is read out as the ``q``-bit label whose
integer value is ``i`` (bit ``q-1`` most significant).  Noise may push a
label to a value ``>= m!`` that encodes no ranking; ``InvalidPolicy`` says
what to do with it.
"""

from __future__ import annotations

import math
from enum import Enum
from functools import lru_cache

import numpy as np

from .preferences import qubits_for

DISCARDED = -1


class InvalidPolicy(str, Enum):
    DISCARD = "discard"
    MODULO = "modulo"
    NEAREST = "nearest"


def label_bits(value, q):
    """Bits of ``value``, most significant first."""
    return tuple((value >> (q - 1 - j)) & 1 for j in range(q))


def bits_value(bits):
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def flip_masks(shape, q, p, rng):
    """Integer XOR masks where each of ``q`` bits is set independently w.p. ``p``."""
    u = rng.random(tuple(np.atleast_1d(shape)) + (q,))
    weights = 1 << np.arange(q - 1, -1, -1)
    return ((u < p) * weights).sum(axis=-1).astype(np.int64)


def apply_bitflip(labels, p, rng, q):
    """Flip each bit of each label independently with probability ``p``.

    ``labels`` is an int or an int array of label values.
    """
    if not 0 <= p <= 1:
        raise ValueError(f"flip probability must lie in [0, 1], got {p}")
    labels = np.asarray(labels, dtype=np.int64)
    return labels ^ flip_masks(labels.shape, q, p, rng)


@lru_cache(maxsize=None)
def decode_table(m, policy):
    """``table[label]`` = decoded ranking index, or ``DISCARDED``."""
    policy = InvalidPolicy(policy)
    n = math.factorial(m)
    q = qubits_for(m)
    table = np.arange(2**q, dtype=np.int64)
    invalid = table >= n
    if policy is InvalidPolicy.DISCARD:
        table[invalid] = DISCARDED
    elif policy is InvalidPolicy.MODULO:
        table[invalid] %= n
    else:
        valid = np.arange(n)
        for lab in np.flatnonzero(invalid):
            dist = [bin(int(lab) ^ int(v)).count("1") for v in valid]
            table[lab] = valid[int(np.argmin(dist))]  # argmin keeps the lowest index on ties
    table.setflags(write=False)
    return table


def decode_with_policy(label, policy, m):
    """Ranking index for ``label``; ``None`` when the policy discards it."""
    out = int(decode_table(m, policy)[int(label)])
    return None if out == DISCARDED else out
