import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import perms
from qmrlab.exceptions import BoundError, InvalidLabelError, InvalidRankingError
from qmrlab.preferences import (
    enumerate_rankings,
    labels,
    lehmer_decode,
    lehmer_encode,
    pair_masks,
    parse_ranking,
    prefers,
    qubits_for,
    ranking_str,
    relabel_permutation,
    reverse_ranking,
    reversal_permutation,
)


def test_m3_numbering():
    names = [ranking_str(r) for r in enumerate_rankings(3)]
    assert names == ["ABC", "ACB", "BAC", "BCA", "CAB", "CBA"]


def test_m1_single_ranking():
    assert enumerate_rankings(1) == ((0,),)


def test_m4_last_is_dcba():
    rs = enumerate_rankings(4)
    assert len(rs) == 24
    assert ranking_str(rs[23]) == "DCBA"


@pytest.mark.parametrize("m", [0, 7, -1])
def test_enumeration_bounds(m):
    with pytest.raises(BoundError):
        enumerate_rankings(m)


@pytest.mark.parametrize("m", range(1, 7))
def test_enumeration_matches_sorted_permutations(m):
    rs = enumerate_rankings(m)
    assert list(rs) == perms(m)
    assert all(a < b for a, b in zip(rs, rs[1:]))


@pytest.mark.parametrize("m", range(1, 7))
def test_lehmer_round_trip_exhaustive(m):
    for i, r in enumerate(enumerate_rankings(m)):
        assert lehmer_encode(r) == i
        assert lehmer_decode(i, m) == r


def test_decode_invalid_label():
    assert lehmer_decode(5, 3) == (2, 1, 0)
    with pytest.raises(InvalidLabelError):
        lehmer_decode(6, 3)


@pytest.mark.parametrize("bad", [(0, 0, 1), (0, 1, 3), ()])
def test_encode_rejects_non_permutations(bad):
    with pytest.raises((InvalidRankingError, BoundError)):
        lehmer_encode(bad)


def test_reverse():
    assert reverse_ranking((0, 1, 2)) == (2, 1, 0)
    assert reverse_ranking((0,)) == (0,)
    pairs = {frozenset((i, int(j))) for i, j in enumerate(reversal_permutation(3))}
    # ACB <-> BCA and BAC <-> CAB, by direct enumeration
    assert pairs == {frozenset({0, 5}), frozenset({1, 3}), frozenset({2, 4})}


@pytest.mark.parametrize("m", range(2, 7))
def test_reverse_is_fixed_point_free_involution(m):
    rev = reversal_permutation(m)
    assert np.array_equal(rev[rev], np.arange(math.factorial(m)))
    assert not np.any(rev == np.arange(math.factorial(m)))


def test_prefers_examples():
    acb = (0, 2, 1)
    assert prefers(acb, 0, 2)
    assert not prefers(acb, 1, 2)
    with pytest.raises(ValueError):
        prefers(acb, 1, 1)


@pytest.mark.parametrize("m", range(2, 6))
def test_pair_counts_and_exclusivity(m):
    masks = pair_masks(m)
    for a, b in itertools.permutations(range(m), 2):
        assert masks[a, b].sum() == math.factorial(m) // 2
        assert np.all(masks[a, b] ^ masks[b, a])
        for i, r in enumerate(enumerate_rankings(m)):
            assert masks[a, b, i] == prefers(r, a, b)


def test_qubit_widths():
    assert [qubits_for(m) for m in range(1, 7)] == [0, 1, 3, 5, 7, 10]


def test_parse_and_labels():
    assert labels(4) == ("A", "B", "C", "D")
    assert parse_ranking("ACB") == (0, 2, 1)
    with pytest.raises(InvalidRankingError):
        parse_ranking("AAB")


@given(st.permutations(range(5)), st.permutations(range(5)))
def test_relabel_composes_like_permutations(r, perm):
    out = relabel_permutation(perm)
    renamed = tuple(perm[x] for x in r)
    assert out[lehmer_encode(r)] == lehmer_encode(renamed)
