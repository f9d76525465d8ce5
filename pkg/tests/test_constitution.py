import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from oracles import chi_soc_exact, extensions_by_filter, qmr_exact, scc_by_reachability
from qmrlab.constitution import (
    QmrParams,
    QmrTable,
    SCCPartition,
    build_majority_digraph,
    chi1,
    chi_soc,
    eu_step,
    gms_step,
    linear_extensions,
    qmr_aggregate,
    tarjan_scc,
    winner_from_distribution,
)
from qmrlab.distributions import deterministic_profile, point_mass, uniform
from qmrlab.exceptions import BoundError, DegeneracyError, ParameterError
from qmrlab.preferences import enumerate_rankings, relabel_permutation

R3 = enumerate_rankings(3)
ABC, ACB, BAC, BCA, CAB, CBA = R3
EXP1_BALLOTS = [ACB, BAC, BCA, CAB, CBA]
EXP2_BALLOTS = [ABC, ABC, ACB, ACB, BAC]
CYCLE = [ABC, BCA, CAB]


def edge_set(g):
    return {(a, b) for a in range(g.m) for b in range(g.m) if g.edges[a, b]}


# -- digraph ----------------------------------------------------------------


def test_exp2_digraph():
    assert edge_set(build_majority_digraph(EXP2_BALLOTS)) == {(0, 1), (0, 2), (1, 2)}


def test_unanimous_digraph_is_total_order():
    assert edge_set(build_majority_digraph([CAB] * 3)) == {(2, 0), (2, 1), (0, 1)}


def test_cycle_digraph():
    assert edge_set(build_majority_digraph(CYCLE)) == {(0, 1), (1, 2), (2, 0)}


def test_ties_give_both_edges():
    g = build_majority_digraph([ABC, CBA])
    assert edge_set(g) == {(a, b) for a in range(3) for b in range(3) if a != b}


def test_epsilon_widens_ties():
    g = build_majority_digraph([ABC, ABC, CBA], epsilon=1)
    assert g.edges[1, 0] and g.edges[0, 1]


# -- SCCs -------------------------------------------------------------------


def test_exp2_sccs_are_a_chain():
    part = tarjan_scc(build_majority_digraph(EXP2_BALLOTS))
    assert part.components == (frozenset({0}), frozenset({1}), frozenset({2}))
    assert {(0, 1), (1, 2)} <= part.dag_edges


def test_cycle_is_one_component():
    assert tarjan_scc(build_majority_digraph(CYCLE)).components == (frozenset({0, 1, 2}),)


def test_edgeless_adjacency():
    part = tarjan_scc(np.zeros((4, 4), dtype=bool))
    assert sorted(map(sorted, part.components)) == [[0], [1], [2], [3]]
    assert part.dag_edges == frozenset()


random_digraphs = st.integers(1, 6).flatmap(lambda m: hnp.arrays(bool, (m, m)))


@given(random_digraphs)
def test_tarjan_matches_reachability(adj):
    np.fill_diagonal(adj, False)
    part = tarjan_scc(adj)
    assert set(part.components) == scc_by_reachability(adj.tolist())
    # condensation order: every edge between components points forward
    where = part.component_of()
    for a, b in zip(*np.nonzero(adj)):
        assert where[a] <= where[b]


# -- linear extensions ------------------------------------------------------


def test_linear_extension_examples():
    chain = SCCPartition(3, (frozenset({0}), frozenset({1}), frozenset({2})), frozenset({(0, 1), (1, 2)}))
    assert linear_extensions(chain) == [0]
    assert linear_extensions(SCCPartition(3, (frozenset({0, 1, 2}),))) == list(range(6))
    top = SCCPartition(3, (frozenset({0, 1}), frozenset({2})), frozenset({(0, 1)}))
    assert linear_extensions(top) == [0, 2]  # ABC, BAC


def test_linear_extensions_follow_transitive_closure():
    # edges only 0->1 and 1->2 at component level; 0 must still precede 2
    part = SCCPartition(3, (frozenset({0}), frozenset({1}), frozenset({2})), frozenset({(0, 1), (1, 2)}))
    assert all(R3[i].index(0) < R3[i].index(2) for i in linear_extensions(part))


def test_linear_extensions_cap():
    with pytest.raises(BoundError):
        linear_extensions(SCCPartition(6, (frozenset(range(6)),)))


@given(st.integers(1, 5).flatmap(lambda m: hnp.arrays(bool, (m, m))))
def test_linear_extensions_match_filter(adj):
    np.fill_diagonal(adj, False)
    assert linear_extensions(tarjan_scc(adj)) == extensions_by_filter(adj.tolist())


# -- pipeline steps ---------------------------------------------------------


def test_chi1_examples():
    assert np.array_equal(chi1(EXP1_BALLOTS), point_mass(CBA))
    assert np.allclose(chi1(CYCLE), uniform(3))
    assert np.array_equal(chi1([BCA, BCA]), point_mass(BCA))


def test_gms_examples():
    c1 = chi1(EXP1_BALLOTS)
    out, k = gms_step(c1, EXP1_BALLOTS, delta=0.0)
    assert np.array_equal(out, c1)
    out, k = gms_step(c1, EXP1_BALLOTS, delta=0.1)
    assert sorted(k) == [(0, 1), (0, 2), (1, 2)]
    _, k = gms_step(chi1([ABC] * 3), [ABC] * 3, delta=0.5)
    assert k == []


def test_gms_rejects_large_delta():
    with pytest.raises(ParameterError, match="ACB"):
        gms_step(chi1(EXP1_BALLOTS), EXP1_BALLOTS, delta=0.34)
    gms_step(chi1(EXP1_BALLOTS), EXP1_BALLOTS, delta=1 / 3)


def test_eu_examples():
    c = np.full(6, 1 / 6)
    assert np.array_equal(eu_step(c, EXP1_BALLOTS), c)
    c2, _ = gms_step(chi1(EXP2_BALLOTS), EXP2_BALLOTS, 0.1)
    out = eu_step(c2, EXP2_BALLOTS)
    assert out[[3, 4, 5]].sum() == 0  # BCA, CAB, CBA put C above A
    assert np.allclose(eu_step(c, [ABC, ABC]), point_mass(ABC))
    with pytest.raises(DegeneracyError):
        eu_step(point_mass(CBA), [ABC])


def test_exp2_delta_tenth_frozen():
    # exact rationals from the brute-force oracle
    rho = qmr_aggregate(deterministic_profile([0, 0, 1, 1, 2], 3), QmrParams(delta=0.1))
    assert np.allclose(rho, [12 / 13, 1 / 26, 1 / 26, 0, 0, 0], atol=1e-12)
    assert winner_from_distribution(rho) == 0


def test_exp1_delta_tenth_frozen():
    rho = qmr_aggregate(deterministic_profile([1, 2, 3, 4, 5], 3), QmrParams(delta=0.1))
    assert np.allclose(rho, [1 / 10, 1 / 15, 1 / 15, 1 / 30, 1 / 30, 7 / 10], atol=1e-12)


def test_mixed_profile_frozen():
    prof = np.array([[0.5, 0, 0, 0, 0, 0.5], [0.5, 0.5, 0, 0, 0, 0], [0, 0, 1 / 3, 2 / 3, 0, 0]])
    expected = [91703 / 196560, 131 / 2340, 62977 / 589680, 263 / 1620, 1 / 20, 19 / 120]
    assert np.allclose(qmr_aggregate(prof, QmrParams(delta=0.1)), expected, atol=1e-12)


@pytest.mark.parametrize("idx, winner, top", [([1, 2, 3, 4, 5], 2, 5), ([0, 0, 1, 1, 2], 0, 0)])
def test_experiments_degenerate_at_delta_zero(idx, winner, top):
    rho = qmr_aggregate(deterministic_profile(idx, 3), QmrParams(delta=0.0))
    assert np.array_equal(rho, point_mass(top, 3))
    assert winner_from_distribution(rho) == winner


def test_unanimous_profile_is_fixed():
    rho = qmr_aggregate(deterministic_profile([0, 0, 0, 0], 3))
    assert np.array_equal(rho, point_mass(0, 3))


def test_winner_from_distribution():
    assert winner_from_distribution(point_mass(CBA)) == 2
    assert winner_from_distribution(uniform(3)) is None


def test_support_cap():
    prof = np.full((8, 6), 1 / 6)
    with pytest.raises(BoundError, match="sampling"):
        qmr_aggregate(prof)


def test_aggregate_cites_offending_term():
    prof = deterministic_profile([1, 2, 3, 4, 5], 3)
    with pytest.raises(ParameterError, match="profile term"):
        qmr_aggregate(prof, QmrParams(delta=0.5))


def test_global_support_mode_differs_from_profile_mode():
    # realised (ABC, ABC, BAC) misses B>A only; voter 3's CBA support adds C>A
    # and C>B globally, which shrinks the chi1 share before EU renormalises
    prof = np.array([[1, 0, 0, 0, 0, 0], [1, 0, 0, 0, 0, 0], [0, 0, 0.5, 0, 0, 0.5]])
    local = qmr_aggregate(prof, QmrParams(delta=0.1))
    glob = qmr_aggregate(prof, QmrParams(delta=0.1, gms_support="global"))
    assert not np.allclose(local, glob)
    assert abs(glob.sum() - 1) < 1e-9
    # realised (ABC, ABC, BAC) term: 0.9 / (0.9 + 0.1/3) locally, 0.7 / (0.7 + 0.1/3) globally
    assert local[0] - glob[0] == pytest.approx(0.5 * (0.9 / (0.9 + 0.1 / 3) - 0.7 / (0.7 + 0.1 / 3)))


# -- invariants against the brute-force pipeline ------------------------------

ballots = st.integers(1, 7).flatmap(lambda n: st.lists(st.integers(0, 5), min_size=n, max_size=n))


@given(ballots, st.sampled_from([0, Fraction(1, 10), Fraction(1, 6)]))
def test_chi_soc_matches_oracle(idx, delta):
    rs = [R3[i] for i in idx]
    try:
        want, k = chi_soc_exact(rs, delta)
    except ValueError:
        with pytest.raises(ParameterError):
            chi_soc(rs, QmrParams(delta=float(delta)))
        return
    got = chi_soc(rs, QmrParams(delta=float(delta)))
    assert np.allclose(got, [float(x) for x in want], atol=1e-12)
    assert abs(got.sum() - 1) <= 1e-9


@pytest.mark.parametrize("n", [3, 5, 7])
def test_eu_mass_bounded_below(n):
    rng = np.random.default_rng(n)
    delta = 0.1
    for _ in range(1000 // 3 + 1):
        rs = [R3[i] for i in rng.integers(0, 6, size=n)]
        c1 = chi1(rs)
        c2, k = gms_step(c1, rs, delta, check=False)
        if delta * len(k) >= 1:
            continue
        from qmrlab.constitution import unanimous_pairs
        from qmrlab.preferences import pair_masks

        unan = unanimous_pairs(rs)
        keep = pair_masks(3)[unan].all(axis=0) if unan.any() else np.ones(6, bool)
        assert np.all(c1[~keep] == 0)
        assert c2[keep].sum() >= 1 - delta * len(k) - 1e-12


def test_deterministic_n5_chain_profiles_degenerate():
    for combo in itertools.combinations_with_replacement(range(6), 5):
        rs = [R3[i] for i in combo]
        part = tarjan_scc(build_majority_digraph(rs))
        if len(part.components) != 3:
            continue
        rho = qmr_aggregate(deterministic_profile(combo, 3), QmrParams(delta=0.0))
        assert rho.max() == 1.0


profiles = st.integers(1, 3).flatmap(lambda n: hnp.arrays(np.float64, (n, 6), elements=st.sampled_from([0.0, 0.5, 1.0, 2.0])))


@given(profiles, st.permutations(range(3)))
def test_relabeling_equivariance(w, perm):
    w[:, 0] += 1e-9 * (w.sum(axis=1) == 0)
    prof = w / w.sum(axis=1, keepdims=True)
    idx = relabel_permutation(perm)
    moved = np.zeros_like(prof)
    moved[:, idx] = prof
    params = QmrParams(delta=0.05)
    a = qmr_aggregate(prof, params)
    b = qmr_aggregate(moved, params)
    assert np.allclose(b[idx], a, atol=1e-12)


@given(profiles)
def test_aggregate_matches_exact_oracle(w):
    w[:, 0] += 1e-9 * (w.sum(axis=1) == 0)
    prof = w / w.sum(axis=1, keepdims=True)
    want = qmr_exact(prof.tolist(), Fraction(1, 20))
    got = qmr_aggregate(prof, QmrParams(delta=0.05))
    assert np.allclose(got, [float(x) for x in want], atol=1e-9)


def test_table_agrees_with_direct_aggregation(rng):
    params = QmrParams(delta=0.1)
    table = QmrTable(3, 3, params)
    for _ in range(20):
        prof = rng.dirichlet(np.ones(6), size=3)
        assert np.allclose(table.aggregate(prof), qmr_aggregate(prof, params), atol=1e-12)


def test_table_names_violating_term():
    table = QmrTable(3, 5, QmrParams(delta=0.5))
    with pytest.raises(ParameterError, match="profile term"):
        table.aggregate(deterministic_profile([1, 2, 3, 4, 5], 3))
