"""The quantum majority rule (QMR) constitution on dephased profiles.

For each realised classical profile ``L = (L_1, ..., L_n)`` the pipeline

1. builds the epsilon-aware majority digraph of the ballots,
2. condenses it into strongly connected components (Tarjan),
3. spreads weight uniformly over all linear extensions of the component
   order (``chi1``),
4. gives the minority a shot: pairs held by some voter but absent from
   ``chi1`` receive weight ``delta`` each (``gms_step``),
5. enforces unanimity by projecting out rankings that contradict a pair all
   voters agree on (``eu_step``).

``qmr_aggregate`` mixes the per-profile results with the product weights
``p(L) = prod_i p_i(L_i)``.  ``QmrTable`` precomputes every per-profile
result for fixed ``(m, n)`` so that repeated aggregation is a tensor
contraction.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .distributions import as_distribution, as_profile, m_from_size, pair_matrix
from .exceptions import BoundError, DegeneracyError, ParameterError
from .preferences import (
    enumerate_rankings,
    lehmer_encode,
    pair_masks,
    position_table,
    ranking_str,
)

SUPPORT_CAP = 10**6
LINEXT_MAX_CANDIDATES = 5
DEFAULT_DELTA = 0.1
DEFAULT_EPSILON = 0.0
GMS_SUPPORT_MODES = ("profile", "global")

_ZERO = 1e-12


@dataclass(frozen=True)
class MajorityDigraph:
    """Pairwise margins and the induced epsilon-aware majority edges."""

    m: int
    margins: np.ndarray
    edges: np.ndarray
    epsilon: float = 0.0


@dataclass(frozen=True)
class SCCPartition:
    """Strongly connected components in topological order (sources first).

    ``dag_edges`` holds ``(i, j)`` when some edge runs from component ``i`` to
    component ``j``; it is not transitively closed.
    """

    m: int
    components: tuple
    dag_edges: frozenset = field(default_factory=frozenset)

    def component_of(self):
        out = [0] * self.m
        for ci, comp in enumerate(self.components):
            for a in comp:
                out[a] = ci
        return out

    def sizes(self):
        return [len(c) for c in self.components]


@dataclass(frozen=True)
class QmrParams:
    delta: float = DEFAULT_DELTA
    epsilon: float = DEFAULT_EPSILON
    gms_support: str = "profile"

    def __post_init__(self):
        if not self.delta >= 0:
            raise ParameterError(f"delta must be >= 0, got {self.delta}")
        if not self.epsilon >= 0:
            raise ParameterError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.gms_support not in GMS_SUPPORT_MODES:
            raise ParameterError(f"gms_support must be one of {GMS_SUPPORT_MODES}")


# -- digraph and components -------------------------------------------------


def _edges_from_margins(margins, epsilon):
    edges = margins >= margins.T - epsilon
    np.fill_diagonal(edges, False)
    return edges


def build_majority_digraph(rankings, epsilon=DEFAULT_EPSILON):
    """Majority digraph of a realised profile given as a sequence of rankings."""
    rankings = [tuple(r) for r in rankings]
    if not rankings:
        raise ValueError("a profile needs at least one ballot")
    m = len(rankings[0])
    pos = position_table(m)
    idx = [lehmer_encode(r) for r in rankings]
    p = pos[idx]  # (n, m) positions
    margins = (p[:, :, None] < p[:, None, :]).sum(axis=0)
    return MajorityDigraph(m, margins, _edges_from_margins(margins, epsilon), epsilon)


def digraph_from_margins(margins, epsilon=DEFAULT_EPSILON):
    """Majority digraph from real-valued margins, e.g. expected tallies."""
    margins = np.asarray(margins, dtype=float)
    return MajorityDigraph(len(margins), margins, _edges_from_margins(margins, epsilon), epsilon)


def tarjan_scc(graph):
    """Strongly connected components of a digraph.

    ``graph`` is a :class:`MajorityDigraph` or a square boolean adjacency
    matrix.  Components come out in topological order of the condensation.
    """
    adj = np.asarray(graph.edges if isinstance(graph, MajorityDigraph) else graph, dtype=bool)
    m = len(adj)
    succ = [np.flatnonzero(adj[v]).tolist() for v in range(m)]

    index, lowlink, on_stack = {}, {}, set()
    stack, found = [], []
    counter = itertools.count()

    def strongconnect(v):
        index[v] = lowlink[v] = next(counter)
        stack.append(v)
        on_stack.add(v)
        for w in succ[v]:
            if w not in index:
                strongconnect(w)
                lowlink[v] = min(lowlink[v], lowlink[w])
            elif w in on_stack:
                lowlink[v] = min(lowlink[v], index[w])
        if lowlink[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on_stack.discard(w)
                comp.append(w)
                if w == v:
                    break
            found.append(frozenset(comp))

    for v in range(m):
        if v not in index:
            strongconnect(v)

    # Tarjan emits sinks first.
    components = tuple(reversed(found))
    where = {a: ci for ci, comp in enumerate(components) for a in comp}
    dag = frozenset(
        (where[a], where[b]) for a in range(m) for b in succ[a] if where[a] != where[b]
    )
    return SCCPartition(m, components, dag)


def _component_closure(partition):
    k = len(partition.components)
    reach = np.zeros((k, k), dtype=bool)
    for i, j in partition.dag_edges:
        reach[i, j] = True
    for mid in range(k):
        reach |= reach[:, [mid]] & reach[[mid], :]
    return reach


def precedence_matrix(partition):
    """``before[a, b]``: every linear extension must place ``a`` above ``b``."""
    reach = _component_closure(partition)
    comp = partition.component_of()
    m = partition.m
    return np.array([[reach[comp[a], comp[b]] for b in range(m)] for a in range(m)], dtype=bool)


def linear_extensions(partition):
    """Lehmer indices of all rankings compatible with the component order, sorted."""
    m = partition.m
    if m > LINEXT_MAX_CANDIDATES:
        raise BoundError(f"linear extensions are capped at m <= {LINEXT_MAX_CANDIDATES}")
    before = precedence_matrix(partition)
    out = []

    def extend(prefix, remaining):
        if not remaining:
            out.append(lehmer_encode(prefix))
            return
        for a in remaining:
            if not any(before[b, a] for b in remaining if b != a):
                extend(prefix + (a,), remaining - {a})

    extend((), frozenset(range(m)))
    return sorted(out)


# -- per-profile pipeline ----------------------------------------------------


def chi1(rankings, epsilon=DEFAULT_EPSILON):
    """Uniform distribution over linear extensions of the majority condensation."""
    g = build_majority_digraph(rankings, epsilon)
    ext = linear_extensions(tarjan_scc(g))
    d = np.zeros(math.factorial(g.m))
    d[ext] = 1.0 / len(ext)
    return d


def ballot_pairs(rankings):
    """``held[a, b]``: at least one ballot ranks ``a`` above ``b``."""
    m = len(rankings[0])
    masks = pair_masks(m)
    idx = [lehmer_encode(r) for r in rankings]
    return masks[:, :, idx].any(axis=2)


def unanimous_pairs(rankings):
    """``unan[a, b]``: every ballot ranks ``a`` above ``b``."""
    m = len(rankings[0])
    masks = pair_masks(m)
    idx = [lehmer_encode(r) for r in rankings]
    return masks[:, :, idx].all(axis=2)


def missing_pairs(chi, held):
    """Ordered pairs held by some voter but carrying no mass in ``chi``."""
    pm = pair_matrix(chi)
    m = len(held)
    return [(a, b) for a in range(m) for b in range(m) if a != b and held[a, b] and pm[a, b] <= _ZERO]


def gms_step(chi, rankings, delta=DEFAULT_DELTA, held=None, check=True):
    """Give the minority a shot.

    Returns ``(chi2, k)`` where ``k`` lists the ordered pairs that some voter
    holds but ``chi`` gives zero weight.  ``held`` overrides the per-ballot
    support (used for the global-support variant).  With ``check`` the
    admissibility bound ``delta * |k| <= 1`` is enforced.
    """
    chi = np.asarray(chi, dtype=float)
    if held is None:
        held = ballot_pairs(rankings)
    k = missing_pairs(chi, held)
    if check and delta * len(k) > 1 + _ZERO:
        raise ParameterError(
            f"delta={delta} exceeds 1/|k| = 1/{len(k)} for profile "
            f"{[ranking_str(r) for r in rankings]}"
        )
    if delta == 0 or not k:
        return chi.copy(), k
    m = len(held)
    masks = pair_masks(m)
    out = (1 - delta * len(k)) * chi
    for a, b in k:
        mask = masks[a, b]
        out = out + delta * mask / mask.sum()
    return out, k


def eu_step(chi, rankings):
    """Enforce unanimity: keep only rankings consistent with every unanimous pair."""
    chi = np.asarray(chi, dtype=float)
    unan = unanimous_pairs(rankings)
    if not unan.any():
        return chi.copy()
    m = len(unan)
    masks = pair_masks(m)
    keep = masks[unan].all(axis=0)
    out = np.where(keep, chi, 0.0)
    mass = out.sum()
    if mass <= _ZERO:
        raise DegeneracyError("no mass left after enforcing unanimity")
    return out / mass


def chi_soc(rankings, params=QmrParams(), held=None, check=True):
    """Full per-profile pipeline ``EU(GMS(chi1(L)))``."""
    c1 = chi1(rankings, params.epsilon)
    c2, _ = gms_step(c1, rankings, params.delta, held=held, check=check)
    return eu_step(c2, rankings)


@lru_cache(maxsize=65536)
def _chi_soc_cached(multiset, m, delta, epsilon, held_key):
    rankings = [enumerate_rankings(m)[i] for i in multiset]
    held = None if held_key is None else np.array(held_key, dtype=bool).reshape(m, m)
    c1 = chi1(rankings, epsilon)
    c2, k = gms_step(c1, rankings, delta, held=held, check=False)
    out = eu_step(c2, rankings)
    out.setflags(write=False)
    return out, len(k)


def _support_pairs(profile, m):
    masks = pair_masks(m).astype(float)
    per_voter = np.einsum("abl,il->iab", masks, profile)
    return (per_voter > _ZERO).any(axis=0)


def qmr_aggregate(profile, params=QmrParams()):
    """Societal distribution ``rho_soc`` of a profile.

    Enumerates every classical profile in the product of the voters'
    supports, so the support product is capped at ``SUPPORT_CAP``.
    """
    profile = as_profile(profile)
    m = m_from_size(profile.shape[1])
    supports = [np.flatnonzero(row > 0).tolist() for row in profile]
    size = math.prod(len(s) for s in supports)
    if size > SUPPORT_CAP:
        raise BoundError(
            f"support product {size} exceeds {SUPPORT_CAP}; prune small probabilities "
            "or estimate rho_soc by sampling"
        )
    held_key = None
    if params.gms_support == "global":
        held_key = tuple(_support_pairs(profile, m).ravel().tolist())
    rho = np.zeros(profile.shape[1])
    for combo in itertools.product(*supports):
        w = math.prod(profile[i, L] for i, L in enumerate(combo))
        if w == 0:
            continue
        dist, k = _chi_soc_cached(tuple(sorted(combo)), m, params.delta, params.epsilon, held_key)
        if params.delta * k > 1 + _ZERO:
            names = [ranking_str(enumerate_rankings(m)[L]) for L in combo]
            raise ParameterError(
                f"delta={params.delta} exceeds 1/|k| = 1/{k} for profile term {names}"
            )
        rho += w * dist
    return as_distribution(rho)


def winner_from_distribution(d):
    """Candidate beating every other with pair probability above one half, else None."""
    pm = pair_matrix(d)
    m = len(pm)
    for c in range(m):
        if all(pm[c, b] > 0.5 + _ZERO for b in range(m) if b != c):
            return c
    return None


class QmrTable:
    """Per-profile QMR outputs for every classical profile of ``n`` voters.

    ``table[L_1, ..., L_n, :]`` holds ``chi_soc(L)``.  Aggregating a profile
    is then a contraction with the voter distributions, which is what the
    shot-based emulation uses on every run.  Only the per-ballot GMS support
    is tabulated, since the global variant depends on the whole profile.
    """

    def __init__(self, m, n, params=QmrParams()):
        if params.gms_support != "profile":
            raise ParameterError("QmrTable supports gms_support='profile' only")
        d = math.factorial(m)
        if d**n > SUPPORT_CAP:
            raise BoundError(f"{d}^{n} profiles exceed the table cap {SUPPORT_CAP}")
        self.m, self.n, self.params = m, n, params
        table = np.empty((d,) * n + (d,))
        ksize = np.empty((d,) * n, dtype=np.int64)
        for combo in itertools.product(range(d), repeat=n):
            dist, k = _chi_soc_cached(tuple(sorted(combo)), m, params.delta, params.epsilon, None)
            table[combo] = dist
            ksize[combo] = k
        self.table = table
        self.violations = params.delta * ksize > 1 + _ZERO

    def aggregate(self, profile):
        profile = np.asarray(profile, dtype=float)
        if profile.shape != (self.n, self.table.shape[-1]):
            raise BoundError(f"profile shape {profile.shape} does not match table")
        if self.violations.any():
            support = np.ones(self.violations.shape, dtype=bool)
            for i, row in enumerate(profile):
                shape = [1] * self.n
                shape[i] = -1
                support = support & (row > 0).reshape(shape)
            bad = np.argwhere(support & self.violations)
            if len(bad):
                names = [ranking_str(enumerate_rankings(self.m)[L]) for L in bad[0]]
                raise ParameterError(f"delta={self.params.delta} exceeds 1/|k| for profile term {names}")
        out = self.table
        for row in profile:
            out = np.tensordot(row, out, axes=(0, 0))
        return np.clip(out, 0.0, None) / out.sum()
