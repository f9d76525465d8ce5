"""Shot-based emulation of the QMR measurement under readout noise.

Two placements of the noise are supported:

``SOCIETAL``
    Draw rankings from the analytic ``rho_soc``, read each out through a
    ``q``-qubit register with independent bit flips, and histogram the
    decoded labels.  Discarded shots are dropped.
``PROFILE``
    Read out every voter's ranking through its own register (``n * q``
    qubits per shot), build the empirical per-voter distributions and run
    the constitution on them.  Discarded ballots are re-drawn so that every
    shot yields a complete profile.

``run_batch`` executes ``N`` noisy runs and ``N`` noiseless baseline runs,
each on its own derived random stream.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .classical import classical_winner
from .constitution import QmrParams, QmrTable, digraph_from_margins, qmr_aggregate, tarjan_scc
from .constitution import winner_from_distribution
from .distributions import as_distribution, as_profile, m_from_size, pair_matrix
from .exceptions import EmptySampleError, ParameterError
from .metrics import MetricsSummary, js_divergence, summarize
from .preferences import labels, qubits_for
from .readout import DISCARDED, InvalidPolicy, decode_table, flip_masks
from .rng import STREAM_BASELINE, STREAM_NOISY, derive_rng

MAX_REDRAWS = 100


class SamplingMode(str, Enum):
    SOCIETAL = "societal"
    PROFILE = "profile"


class BaselineKind(str, Enum):
    POOLED = "pooled"
    PAIRED = "paired"
    ANALYTIC = "analytic"


@dataclass(frozen=True)
class NoiseConfig:
    readout_p: float = 0.0
    invalid_policy: InvalidPolicy = InvalidPolicy.DISCARD
    mode: SamplingMode = SamplingMode.PROFILE
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.readout_p <= 1:
            raise ParameterError(f"readout_p must lie in [0, 1], got {self.readout_p}")
        object.__setattr__(self, "invalid_policy", InvalidPolicy(self.invalid_policy))
        object.__setattr__(self, "mode", SamplingMode(self.mode))

    def noiseless(self):
        return NoiseConfig(0.0, self.invalid_policy, self.mode, self.seed)


@dataclass
class RunRecord:
    run_index: int
    shots: int
    empirical: np.ndarray
    winner: int | None
    scc_summary: list
    js_vs_baseline: float = float("nan")
    discard_fraction: float = 0.0
    profile_counts: np.ndarray | None = field(default=None, repr=False)
    shot_counts: np.ndarray | None = field(default=None, repr=False)

    def to_json(self, **extra):
        m = m_from_size(self.empirical.size)
        names = labels(m)
        row = dict(extra)
        row.update(
            run_index=self.run_index,
            shots=self.shots,
            winner=None if self.winner is None else names[self.winner],
            scc_sizes=self.scc_summary,
            n_scc=len(self.scc_summary),
            js_vs_baseline=self.js_vs_baseline,
            discard_fraction=self.discard_fraction,
            empirical=[float(x) for x in self.empirical],
        )
        if self.profile_counts is not None:
            row["profile_counts"] = self.profile_counts.astype(int).tolist()
        if self.shot_counts is not None:
            row["shot_counts"] = self.shot_counts.astype(int).tolist()
        return json.dumps(row, sort_keys=True)


def _read_out(indices, m, p, policy, rng):
    q = qubits_for(m)
    labels_ = np.asarray(indices, dtype=np.int64) ^ flip_masks(len(indices), q, p, rng)
    return decode_table(m, policy)[labels_]


def societal_counts(rho_soc, shots, noise, rng):
    """Histogram of decoded societal shots; returns ``(counts, n_discarded)``."""
    rho_soc = as_distribution(rho_soc)
    m = m_from_size(rho_soc.size)
    draws = rng.choice(rho_soc.size, size=shots, p=rho_soc)
    decoded = _read_out(draws, m, noise.readout_p, noise.invalid_policy, rng)
    kept = decoded[decoded != DISCARDED]
    return np.bincount(kept, minlength=rho_soc.size), shots - kept.size


def sample_societal(rho_soc, shots, noise, rng):
    """Empirical ``rho_soc`` estimate from ``shots`` noisy readouts."""
    counts, _ = societal_counts(rho_soc, shots, noise, rng)
    if counts.sum() == 0:
        raise EmptySampleError(f"all {shots} shots were discarded")
    return counts / counts.sum()


def profile_counts(profile, shots, noise, rng):
    """Per-voter histograms of decoded ballots; returns ``(counts, n_discarded)``.

    A discarded ballot is re-drawn from the voter's distribution and read
    out again, up to ``MAX_REDRAWS`` times.
    """
    profile = as_profile(profile)
    n, size = profile.shape
    m = m_from_size(size)
    counts = np.zeros((n, size), dtype=np.int64)
    discarded = 0
    for v in range(n):
        draws = rng.choice(size, size=shots, p=profile[v])
        decoded = _read_out(draws, m, noise.readout_p, noise.invalid_policy, rng)
        for _ in range(MAX_REDRAWS):
            bad = np.flatnonzero(decoded == DISCARDED)
            if bad.size == 0:
                break
            discarded += bad.size
            redraw = rng.choice(size, size=bad.size, p=profile[v])
            decoded[bad] = _read_out(redraw, m, noise.readout_p, noise.invalid_policy, rng)
        else:
            if (decoded == DISCARDED).any():
                raise EmptySampleError(f"voter {v}: ballots still invalid after {MAX_REDRAWS} re-draws")
        counts[v] = np.bincount(decoded, minlength=size)
    return counts, discarded


def _aggregator(n, m, params, table):
    if table is not None:
        return table.aggregate
    if params.gms_support == "profile":
        try:
            return QmrTable(m, n, params).aggregate
        except Exception:  # table too large: fall back to direct enumeration
            pass
    return lambda prof: qmr_aggregate(prof, params)


def sample_profile(profile, shots, noise, rng, qmr_params=QmrParams(), table=None):
    """``rho_soc`` of the empirical per-voter distributions after noisy readout."""
    counts, _ = profile_counts(profile, shots, noise, rng)
    n, size = counts.shape
    agg = _aggregator(n, m_from_size(size), qmr_params, table)
    return agg(counts / shots)


def scc_sizes(dist):
    """Component sizes (top first) of the majority digraph of ``dist``'s pair probabilities."""
    return tarjan_scc(digraph_from_margins(pair_matrix(dist))).sizes()


@dataclass
class Batch:
    """Noisy runs, their noiseless twins and the reference quantities."""

    noise: NoiseConfig
    shots: int
    runs: list
    baseline: list
    baseline_dist: np.ndarray
    reference: int | None
    analytic: np.ndarray

    def summary(self) -> MetricsSummary:
        return summarize(
            [r.winner for r in self.runs],
            [r.winner for r in self.baseline],
            self.reference,
            [r.empirical for r in self.runs],
            self.baseline_dist,
        )


def _one_run(profile, rho_soc, shots, noise, rng, aggregate, run_index):
    if noise.mode is SamplingMode.SOCIETAL:
        counts, dropped = societal_counts(rho_soc, shots, noise, rng)
        if counts.sum() == 0:
            raise EmptySampleError(f"run {run_index}: all {shots} shots were discarded")
        empirical = counts / counts.sum()
        rec = RunRecord(run_index, shots, empirical, None, [], discard_fraction=dropped / shots)
        rec.shot_counts = counts
    else:
        counts, dropped = profile_counts(profile, shots, noise, rng)
        empirical = aggregate(counts / shots)
        total = counts.sum() + dropped
        rec = RunRecord(run_index, shots, empirical, None, [], discard_fraction=dropped / total)
        rec.profile_counts = counts
    rec.winner = winner_from_distribution(empirical)
    rec.scc_summary = scc_sizes(empirical)
    return rec


def run_batch(
    profile,
    shots,
    runs,
    noise,
    qmr_params=QmrParams(),
    *,
    baseline=BaselineKind.POOLED,
    table=None,
    workers=1,
    baseline_runs=None,
):
    """``runs`` noisy runs plus ``runs`` noiseless baseline runs.

    Run ``i`` of the noisy batch draws from stream ``(seed, NOISY, i)`` and
    baseline run ``i`` from ``(seed, BASELINE, i)``; neither depends on the
    noise level, so sweeps share random numbers across grid points.  Pass
    ``baseline_runs`` to reuse a baseline computed for the same profile.
    """
    if runs < 2:
        raise ParameterError("a batch needs at least 2 runs for flip rates")
    profile = as_profile(profile)
    n, size = profile.shape
    m = m_from_size(size)
    baseline = BaselineKind(baseline)
    aggregate = _aggregator(n, m, qmr_params, table)
    analytic = aggregate(profile)
    clean = noise.noiseless()

    def execute(cfg, stream, i):
        return _one_run(profile, analytic, shots, cfg, derive_rng(noise.seed, stream, i), aggregate, i)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        if baseline_runs is None:
            base = list(pool.map(lambda i: execute(clean, STREAM_BASELINE, i), range(runs)))
        else:
            base = baseline_runs
        noisy = list(pool.map(lambda i: execute(noise, STREAM_NOISY, i), range(runs)))

    if baseline is BaselineKind.ANALYTIC:
        ref_dist = analytic
    elif noise.mode is SamplingMode.SOCIETAL:
        pooled = sum(r.shot_counts for r in base)
        ref_dist = pooled / pooled.sum()
    else:
        pooled = sum(r.profile_counts for r in base)
        ref_dist = aggregate(pooled / pooled.sum(axis=1, keepdims=True))

    for i, rec in enumerate(noisy):
        target = base[i].empirical if baseline is BaselineKind.PAIRED else ref_dist
        rec.js_vs_baseline = js_divergence(rec.empirical, target)
    for rec in base:
        rec.js_vs_baseline = js_divergence(rec.empirical, ref_dist)

    return Batch(noise, shots, noisy, base, ref_dist, classical_winner(profile), analytic)
