"""Run-level stability metrics: winner agreement, normalised flip rate, JS divergence."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np


@dataclass(frozen=True)
class MetricsSummary:
    gamma_win: float
    gamma_run: float
    gamma_0: float
    flip_rate_norm: float
    js_mean: float
    N: int

    def as_row(self, **extra):
        row = dict(extra)
        row.update(asdict(self))
        return row


def winner_agreement(winners, reference):
    """Fraction of runs whose winner equals ``reference``; ``None`` matches ``None``."""
    winners = list(winners)
    if not winners:
        raise ValueError("winner_agreement needs at least one run")
    return sum(w == reference for w in winners) / len(winners)


def _raw_flip_rate(winners):
    return sum(a != b for a, b in zip(winners, winners[1:])) / (len(winners) - 1)


def flip_rate_normalized(winners, baseline_winners):
    """Adjacent-run flip rates and their ratio with pseudo-count ``1/N``.

    Returns ``(gamma_run, gamma_0, flip_rate_norm)``.  ``None`` (no winner)
    is an ordinary label.
    """
    winners, baseline_winners = list(winners), list(baseline_winners)
    n = len(winners)
    if n < 2 or len(baseline_winners) != n:
        raise ValueError("flip rates need two equally long batches of at least 2 runs")
    gamma_run = _raw_flip_rate(winners)
    gamma_0 = _raw_flip_rate(baseline_winners)
    pc = 1.0 / n
    if gamma_0 == 0:
        norm = gamma_run / pc
    else:
        norm = gamma_run / (gamma_0 + pc)
    return gamma_run, gamma_0, norm


def js_divergence(p, q):
    """Base-2 Jensen-Shannon divergence, in [0, 1]."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch {p.shape} vs {q.shape}")
    if np.array_equal(p, q):
        return 0.0
    mix = 0.5 * (p + q)
    # Summing the two KL terms pointwise keeps the result symmetric in p, q.
    terms = np.zeros_like(mix)
    for x in (p, q):
        nz = x > 0
        terms[nz] += x[nz] * np.log2(x[nz] / mix[nz])
    js = 0.5 * float(np.sort(terms).sum())
    return min(max(js, 0.0), 1.0)


def js_batch_mean(runs, baseline):
    runs = list(runs)
    if not runs:
        raise ValueError("js_batch_mean needs at least one run")
    return float(np.mean([js_divergence(r, baseline) for r in runs]))


def summarize(winners, baseline_winners, reference, run_dists, baseline_dist):
    gamma_run, gamma_0, norm = flip_rate_normalized(winners, baseline_winners)
    return MetricsSummary(
        gamma_win=winner_agreement(winners, reference),
        gamma_run=gamma_run,
        gamma_0=gamma_0,
        flip_rate_norm=norm,
        js_mean=js_batch_mean(run_dists, baseline_dist),
        N=len(winners),
    )
