"""Entanglement testbed: correlated voter blocks, mini-round majorities and bit-flip noise.

Every iteration samples one ballot per voter from its block, reads each
ballot out through a noisy ``q``-qubit register, and records the ranking
that appears strictly most often (or ``DRAW``).  ``GHZ`` blocks vote in
lock step for ``L`` or its reversal, ``SEPARABLE`` blocks pick between the
two independently per voter, and ``RANDOM`` blocks pick uniformly from all
rankings.
"""

from __future__ import annotations

import csv
import itertools
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import stats

from .distributions import as_distribution, as_profile, m_from_size
from .exceptions import BoundError, ParameterError
from .preferences import (
    enumerate_rankings,
    labels,
    lehmer_encode,
    n_rankings,
    qubits_for,
    ranking_str,
    reverse_ranking,
)
from .readout import DISCARDED, InvalidPolicy, apply_bitflip, decode_table, decode_with_policy, flip_masks
from .rng import STREAM_QMR2, derive_rng

__all__ = [
    "DRAW",
    "BlockKind",
    "Tally",
    "VoterBlockSpec",
    "Qmr2Config",
    "Qmr2Result",
    "sample_block",
    "mini_round_majority",
    "run_qmr2",
    "qmr2_constitution_analytic",
    "histogram_chi2",
    "apply_bitflip",
    "decode_with_policy",
]

DRAW = -1
SUPPORT_CAP = 10**6


class BlockKind(str, Enum):
    GHZ = "ghz"
    SEPARABLE = "separable"
    RANDOM = "random"


class Tally(str, Enum):
    RANKING = "ranking"
    TOP_CANDIDATE = "top_candidate"


@dataclass(frozen=True)
class VoterBlockSpec:
    kind: BlockKind
    size: int
    base_ranking: tuple = (0, 1, 2)

    def __post_init__(self):
        object.__setattr__(self, "kind", BlockKind(self.kind))
        if self.size < 1:
            raise ParameterError(f"block size must be >= 1, got {self.size}")
        object.__setattr__(self, "base_ranking", tuple(self.base_ranking))
        lehmer_encode(self.base_ranking)  # validates

    @property
    def m(self):
        return len(self.base_ranking)

    def pair(self):
        """Lehmer indices of ``L`` and its reversal."""
        return lehmer_encode(self.base_ranking), lehmer_encode(reverse_ranking(self.base_ranking))


def _block_indices(spec, rng):
    if spec.kind is BlockKind.RANDOM:
        return rng.integers(n_rankings(spec.m), size=spec.size)
    a, b = spec.pair()
    if spec.kind is BlockKind.GHZ:
        pick = rng.random() < 0.5
        return np.full(spec.size, a if pick else b, dtype=np.int64)
    pick = rng.random(spec.size) < 0.5
    return np.where(pick, a, b).astype(np.int64)


def sample_block(spec, rng):
    """One realisation of the block's ballots, as rankings."""
    table = enumerate_rankings(spec.m)
    return [table[i] for i in _block_indices(spec, rng)]


def _majority_of(values):
    counts = Counter(values).most_common(2)
    if len(counts) > 1 and counts[0][1] == counts[1][1]:
        return DRAW
    return counts[0][0]


def mini_round_majority(ballots, tally=Tally.RANKING):
    """Strictly most frequent ballot (Lehmer index) or top candidate; ``DRAW`` on a tie."""
    ballots = [tuple(b) for b in ballots]
    if not ballots:
        raise ParameterError("a mini-round needs at least one ballot")
    if Tally(tally) is Tally.TOP_CANDIDATE:
        return _majority_of([b[0] for b in ballots])
    return _majority_of([lehmer_encode(b) for b in ballots])


@dataclass(frozen=True)
class Qmr2Config:
    m: int = 3
    blocks: tuple = (VoterBlockSpec(BlockKind.GHZ, 4),)
    iterations: int = 10_000
    bitflip_p: float = 0.0
    invalid_policy: InvalidPolicy = InvalidPolicy.DISCARD
    seed: int = 0
    tally: Tally = Tally.RANKING

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "invalid_policy", InvalidPolicy(self.invalid_policy))
        object.__setattr__(self, "tally", Tally(self.tally))
        if not self.blocks:
            raise ParameterError("at least one voter block is required")
        if any(b.kind is not BlockKind.RANDOM and b.m != self.m for b in self.blocks):
            raise ParameterError(f"block base rankings must have {self.m} candidates")
        if self.iterations < 1:
            raise ParameterError(f"iterations must be >= 1, got {self.iterations}")
        if not 0 <= self.bitflip_p <= 1:
            raise ParameterError(f"bitflip_p must lie in [0, 1], got {self.bitflip_p}")

    @property
    def voters(self):
        return sum(b.size for b in self.blocks)


@dataclass
class Qmr2Result:
    """Outcome histogram; ``counts[0]`` is the draw count, ``counts[j + 1]`` outcome ``j``."""

    m: int
    tally: Tally
    counts: np.ndarray
    discarded_ballots: int
    total_ballots: int
    all_discarded_rounds: int
    meta: dict = field(default_factory=dict)

    @property
    def iterations(self):
        return int(self.counts.sum())

    @property
    def outcomes(self):
        return [DRAW] + list(range(len(self.counts) - 1))

    def count(self, outcome):
        return int(self.counts[outcome + 1])

    def frequency(self, outcome):
        return self.count(outcome) / self.iterations

    @property
    def frequencies(self):
        return self.counts / self.iterations

    @property
    def discard_fraction(self):
        return self.discarded_ballots / self.total_ballots if self.total_ballots else 0.0

    def outcome_label(self, outcome):
        if outcome == DRAW:
            return "draw"
        if self.tally is Tally.TOP_CANDIDATE:
            return labels(self.m)[outcome]
        return ranking_str(enumerate_rankings(self.m)[outcome])

    def rows(self):
        return [
            (o, self.outcome_label(o), self.count(o), self.frequency(o)) for o in self.outcomes
        ]

    def write_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["outcome_index", "label", "count", "frequency"])
            for o, lab, c, f in self.rows():
                w.writerow([o, lab, c, repr(float(f))])


def _iteration(cfg, i, decode, q):
    rng = derive_rng(cfg.seed, STREAM_QMR2, i)
    ballots = np.concatenate([_block_indices(b, rng) for b in cfg.blocks])
    ballots = decode[ballots ^ flip_masks(len(ballots), q, cfg.bitflip_p, rng)]
    kept = ballots[ballots != DISCARDED]
    dropped = len(ballots) - len(kept)
    if kept.size == 0:
        return DRAW, dropped, True
    if cfg.tally is Tally.TOP_CANDIDATE:
        tops = np.array([r[0] for r in enumerate_rankings(cfg.m)])
        kept = tops[kept]
    return _majority_of(kept.tolist()), dropped, False


def _run_chunk(cfg, start, stop, size):
    decode = decode_table(cfg.m, cfg.invalid_policy)
    q = qubits_for(cfg.m)
    counts = np.zeros(size + 1, dtype=np.int64)
    dropped = empty = 0
    for i in range(start, stop):
        outcome, d, e = _iteration(cfg, i, decode, q)
        counts[outcome + 1] += 1
        dropped += d
        empty += e
    return counts, dropped, empty


def run_qmr2(cfg, workers=1):
    """Histogram of mini-round outcomes over ``cfg.iterations`` iterations.

    Iteration ``i`` draws from its own stream ``(seed, QMR2, i)``, so the
    result does not depend on ``workers``.
    """
    size = cfg.m if cfg.tally is Tally.TOP_CANDIDATE else math.factorial(cfg.m)
    workers = max(1, int(workers))
    bounds = np.linspace(0, cfg.iterations, workers + 1).astype(int)
    chunks = list(zip(bounds[:-1], bounds[1:]))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda c: _run_chunk(cfg, c[0], c[1], size), chunks))
    counts = sum(p[0] for p in parts)
    return Qmr2Result(
        m=cfg.m,
        tally=cfg.tally,
        counts=counts,
        discarded_ballots=int(sum(p[1] for p in parts)),
        total_ballots=cfg.voters * cfg.iterations,
        all_discarded_rounds=int(sum(p[2] for p in parts)),
        meta={"bitflip_p": cfg.bitflip_p, "policy": cfg.invalid_policy.value, "seed": cfg.seed},
    )


def qmr2_constitution_analytic(profile):
    """Plurality over realised ballots with uniformly random tie-breaking, averaged over the profile."""
    profile = as_profile(profile)
    size = profile.shape[1]
    m_from_size(size)
    supports = [np.flatnonzero(row > 0).tolist() for row in profile]
    total = math.prod(len(s) for s in supports)
    if total > SUPPORT_CAP:
        raise BoundError(f"support product {total} exceeds {SUPPORT_CAP}")
    pi = np.zeros(size)
    for combo in itertools.product(*supports):
        w = math.prod(profile[i, L] for i, L in enumerate(combo))
        n_L = np.bincount(combo, minlength=size)
        winners = np.flatnonzero(n_L == n_L.max())
        pi[winners] += w / len(winners)
    return as_distribution(pi)


def histogram_chi2(a, b):
    """Two-sample chi-square homogeneity test on outcome counts; returns ``(stat, p_value)``.

    Outcomes absent from both histograms are dropped first.
    """
    table = np.vstack([np.asarray(a.counts if hasattr(a, "counts") else a),
                       np.asarray(b.counts if hasattr(b, "counts") else b)])
    table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] < 2:
        return 0.0, 1.0
    res = stats.chi2_contingency(table, correction=False)
    return float(res.statistic), float(res.pvalue)
