"""Experiment configs, presets, sweeps and their on-disk outputs.

A sweep writes three files into its output directory:

``metrics.csv``
    one row per noise level (``noise_p, gamma_win, gamma_run, gamma_0,
    flip_rate_norm, js_mean, N, shots``);
``runs.jsonl``
    every run record, noisy runs tagged with their grid index and the shared
    noiseless baseline tagged ``"kind": "baseline"``;
``manifest.json``
    config echo, reference winner, file list and timestamps.

Only the manifest carries timestamps, so the CSV and JSON-lines files are
byte-identical across re-runs with the same seed.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .classical import classical_winner, pairwise_expectations
from .constitution import QmrParams, QmrTable, qmr_aggregate, winner_from_distribution
from .distributions import NORM_TOL, deterministic_profile
from .exceptions import BoundError, ConfigError, ParameterError
from .noise import BaselineKind, NoiseConfig, SamplingMode, run_batch, scc_sizes
from .preferences import MAX_CANDIDATES, enumerate_rankings, labels, ranking_str
from .qmr2 import BlockKind, Qmr2Config, VoterBlockSpec, histogram_chi2, run_qmr2
from .readout import InvalidPolicy

DEFAULT_GRID = (0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5)
DEFAULT_SHOT_GRID = (50, 100, 500, 1000, 10_000)
METRIC_COLUMNS = ("noise_p", "gamma_win", "gamma_run", "gamma_0", "flip_rate_norm", "js_mean", "N", "shots")
OUT_ENV = "QMRLAB_OUT"

SEED_EXP1 = 20_250_101
SEED_EXP2 = 20_250_102
SEED_QMR2 = 20_250_103


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    m: int
    profile: tuple
    delta: float = 0.0
    epsilon: float = 0.0
    gms_support: str = "profile"
    grid: tuple = DEFAULT_GRID
    shots: int = 500
    runs: int = 100
    mode: str = SamplingMode.PROFILE.value
    invalid_policy: str = InvalidPolicy.DISCARD.value
    baseline: str = BaselineKind.POOLED.value
    seed: int = 0
    out_dir: str | None = None

    @property
    def params(self):
        return QmrParams(self.delta, self.epsilon, self.gms_support)

    @property
    def profile_array(self):
        return np.array(self.profile, dtype=float)

    def noise(self, p):
        return NoiseConfig(p, self.invalid_policy, self.mode, self.seed)

    def to_dict(self):
        d = asdict(self)
        d["profile"] = [list(row) for row in self.profile]
        d["grid"] = list(self.grid)
        return d

    @classmethod
    def from_dict(cls, data):
        """Validated config; errors name the offending field."""
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        extra = sorted(set(data) - known)
        if extra:
            raise ConfigError(f"unknown field(s) {extra}", extra[0])
        for key in ("name", "m", "profile"):
            if key not in data:
                raise ConfigError("required field missing", key)
        d = dict(data)
        d["profile"] = tuple(tuple(float(x) for x in row) for row in _list(d["profile"], "profile"))
        if "grid" in d:
            d["grid"] = tuple(float(x) for x in _list(d["grid"], "grid"))
        cfg = cls(**d)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON ({exc})", str(path)) from exc
        return cls.from_dict(data)

    def validate(self):
        if not isinstance(self.m, int) or not 2 <= self.m <= MAX_CANDIDATES:
            raise ConfigError(f"must be an integer in [2, {MAX_CANDIDATES}]", "m")
        size = math.factorial(self.m)
        if not self.profile:
            raise ConfigError("needs at least one voter", "profile")
        for i, row in enumerate(self.profile):
            path = f"profile[{i}]"
            if len(row) != size:
                raise ConfigError(f"has {len(row)} entries, expected {size}", path)
            for j, x in enumerate(row):
                if not 0 <= x <= 1:
                    raise ConfigError(f"probability {x} outside [0, 1]", f"{path}[{j}]")
            if abs(sum(row) - 1) > NORM_TOL:
                raise ConfigError(f"sums to {sum(row)!r}, not 1", path)
        if not self.grid:
            raise ConfigError("noise grid is empty", "grid")
        for i, p in enumerate(self.grid):
            if not 0 <= p <= 1:
                raise ConfigError(f"noise level {p} outside [0, 1]", f"grid[{i}]")
        if not isinstance(self.shots, int) or self.shots < 1:
            raise ConfigError("must be a positive integer", "shots")
        if not isinstance(self.runs, int) or self.runs < 2:
            raise ConfigError("must be an integer >= 2", "runs")
        for key, enum in (("mode", SamplingMode), ("invalid_policy", InvalidPolicy), ("baseline", BaselineKind)):
            try:
                enum(getattr(self, key))
            except ValueError:
                raise ConfigError(f"must be one of {[e.value for e in enum]}", key) from None
        try:
            self.params
        except ParameterError as exc:
            raise ConfigError(str(exc), "delta/epsilon/gms_support") from None
        if not isinstance(self.seed, int):
            raise ConfigError("must be an integer", "seed")


def _list(value, path):
    if not isinstance(value, (list, tuple)):
        raise ConfigError("must be a list", path)
    return value


def _preset(name, indices, seed):
    prof = deterministic_profile(indices, 3)
    return ExperimentConfig(name=name, m=3, profile=tuple(tuple(r) for r in prof.tolist()), seed=seed)


def preset_experiment_1():
    """Five voters on ACB, BAC, BCA, CAB, CBA; every pairwise margin is 3 to 2."""
    return _preset("exp1", [1, 2, 3, 4, 5], SEED_EXP1)


def preset_experiment_2():
    """Two voters on ABC, two on ACB, one on BAC."""
    return _preset("exp2", [0, 0, 1, 1, 2], SEED_EXP2)


def preset_hardware_like(base=None):
    """Short runs mirroring a device budget: 50 shots, 10 runs."""
    base = base or preset_experiment_1()
    return replace(base, name=base.name + "-hw", shots=50, runs=10)


PRESETS = {"exp1": preset_experiment_1, "exp2": preset_experiment_2}


# -- output plumbing ---------------------------------------------------------


def resolve_out_dir(config_out=None, override=None, default="results"):
    """``override`` (CLI) beats ``$QMRLAB_OUT`` beats the config value beats ``default``."""
    for cand in (override, os.environ.get(OUT_ENV), config_out):
        if cand:
            return Path(cand)
    return Path(default)


def _now():
    return datetime.now(timezone.utc).isoformat()


def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, (int, float, np.number)) else v for v in row])


def _write_manifest(out, config_echo, files, started, extra=None):
    manifest = {
        "tool": "qmrlab",
        "version": __version__,
        "config": config_echo,
        "files": sorted(files),
        "started": started,
        "finished": _now(),
    }
    manifest.update(extra or {})
    missing = [f for f in files if not (out / f).exists()]
    if missing:
        raise FileNotFoundError(f"manifest references missing files {missing}")
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def _table_for(cfg):
    if cfg.gms_support != "profile":
        return None
    try:
        return QmrTable(cfg.m, len(cfg.profile), cfg.params)
    except BoundError:
        return None


# -- operations --------------------------------------------------------------


def analytic_report(cfg):
    """Classical tallies, ``rho_soc`` and the QMR winner, without sampling."""
    prof = cfg.profile_array
    tally = pairwise_expectations(prof)
    rho = qmr_aggregate(prof, cfg.params)
    names = labels(cfg.m)
    win = classical_winner(prof)
    qwin = winner_from_distribution(rho)
    return {
        "name": cfg.name,
        "pairwise": {
            f"{names[a]}>{names[b]}": float(tally.expected[a, b])
            for a in range(cfg.m)
            for b in range(cfg.m)
            if a != b
        },
        "classical_winner": None if win is None else names[win],
        "rho_soc": {ranking_str(r): float(x) for r, x in zip(enumerate_rankings(cfg.m), rho)},
        "qmr_winner": None if qwin is None else names[qwin],
        "scc_sizes": scc_sizes(rho),
    }


@dataclass
class SweepReport:
    out_dir: Path
    rows: list
    reference: int | None
    manifest: dict = field(default_factory=dict)


def run_sweep(cfg, out=None, workers=1):
    """One batch per noise level; writes metrics.csv, runs.jsonl, manifest.json.

    The noiseless baseline is computed once (it does not depend on the noise
    level) and shared by every grid point.
    """
    cfg.validate()
    out = Path(out) if out is not None else resolve_out_dir(cfg.out_dir, default=f"results/{cfg.name}")
    started = _now()
    prof = cfg.profile_array
    table = _table_for(cfg)
    batches = []
    base = None
    for p in cfg.grid:
        b = run_batch(
            prof, cfg.shots, cfg.runs, cfg.noise(p), cfg.params,
            baseline=cfg.baseline, table=table, workers=workers, baseline_runs=base,
        )
        base = b.baseline
        batches.append(b)

    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for p, b in zip(cfg.grid, batches):
        s = b.summary()
        rows.append([p, s.gamma_win, s.gamma_run, s.gamma_0, s.flip_rate_norm, s.js_mean, s.N, cfg.shots])
    _write_csv(out / "metrics.csv", METRIC_COLUMNS, rows)
    with open(out / "runs.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for rec in base:
            fh.write(rec.to_json(kind="baseline", grid_index=None, noise_p=0.0) + "\n")
        for gi, (p, b) in enumerate(zip(cfg.grid, batches)):
            for rec in b.runs:
                fh.write(rec.to_json(kind="noisy", grid_index=gi, noise_p=p) + "\n")

    ref = batches[0].reference
    names = labels(cfg.m)
    manifest = _write_manifest(
        out, cfg.to_dict(), ["metrics.csv", "runs.jsonl"], started,
        {"reference_winner": None if ref is None else names[ref],
         "baseline_dist": [float(x) for x in batches[0].baseline_dist]},
    )
    return SweepReport(out, rows, ref, manifest)


def run_shot_convergence(cfg, shot_grid=DEFAULT_SHOT_GRID, out=None, workers=1):
    """Metrics per ``(shots, noise_p)`` cell, written as long-format ``shot_convergence.csv``."""
    cfg.validate()
    shot_grid = tuple(shot_grid)
    if not shot_grid or any(int(s) < 1 for s in shot_grid):
        raise ConfigError("shot grid must hold positive integers", "shot_grid")
    out = Path(out) if out is not None else resolve_out_dir(cfg.out_dir, default=f"results/{cfg.name}-shots")
    started = _now()
    prof = cfg.profile_array
    table = _table_for(cfg)
    rows = []
    for shots in shot_grid:
        base = None
        for p in cfg.grid:
            b = run_batch(prof, int(shots), cfg.runs, cfg.noise(p), cfg.params,
                          baseline=cfg.baseline, table=table, workers=workers, baseline_runs=base)
            base = b.baseline
            s = b.summary()
            rows.append([int(shots), p, s.gamma_win, s.gamma_run, s.gamma_0, s.flip_rate_norm, s.js_mean, s.N])
    out.mkdir(parents=True, exist_ok=True)
    header = ("shots", "noise_p", "gamma_win", "gamma_run", "gamma_0", "flip_rate_norm", "js_mean", "N")
    _write_csv(out / "shot_convergence.csv", header, rows)
    echo = dict(cfg.to_dict(), shot_grid=list(shot_grid))
    _write_manifest(out, echo, ["shot_convergence.csv"], started)
    return rows


# -- QMR2 scenarios ----------------------------------------------------------

QMR2_SCENARIOS = ("ghz", "separable", "random", "mixed")
QMR2_NOISE = (0.0, 0.1, 0.3, 0.5)


def qmr2_blocks(scenario, k=4, base=(0, 1, 2)):
    """Voter blocks for a named scenario; ``mixed`` pairs a GHZ half with a random half."""
    if scenario == "mixed":
        if k < 2:
            raise ConfigError("mixed scenario needs k >= 2", "k")
        half = k // 2
        return (VoterBlockSpec(BlockKind.GHZ, k - half, base), VoterBlockSpec(BlockKind.RANDOM, half, base))
    try:
        kind = BlockKind(scenario)
    except ValueError:
        raise ConfigError(f"unknown scenario, expected one of {QMR2_SCENARIOS}", "scenario") from None
    return (VoterBlockSpec(kind, k, base),)


def preset_qmr2(scenario="ghz", p=0.0, k=4, iterations=10_000, policy=InvalidPolicy.DISCARD, seed=SEED_QMR2):
    return Qmr2Config(m=3, blocks=qmr2_blocks(scenario, k), iterations=iterations,
                      bitflip_p=p, invalid_policy=policy, seed=seed)


def run_qmr2_scenarios(out=None, k=4, iterations=10_000, policy=InvalidPolicy.DISCARD,
                       seed=SEED_QMR2, noise=QMR2_NOISE, workers=1):
    """Histograms for every scenario and noise level plus a summary against the random pool.

    Each histogram goes to ``qmr2_<scenario>_p<p>.csv``; ``qmr2_summary.csv``
    lists draw and discard rates and the chi-square p-value of each
    histogram against the random scenario at the same noise level.
    """
    out = Path(out) if out is not None else resolve_out_dir(default="results/qmr2")
    started = _now()
    results = {}
    for p in noise:
        for sc in QMR2_SCENARIOS:
            # distinct streams per scenario keep the chi-square samples independent
            cfg = preset_qmr2(sc, p, k, iterations, policy, seed + QMR2_SCENARIOS.index(sc))
            results[sc, p] = run_qmr2(cfg, workers=workers)
    out.mkdir(parents=True, exist_ok=True)
    files, summary = [], []
    for (sc, p), res in results.items():
        name = f"qmr2_{sc}_p{p:g}.csv"
        res.write_csv(out / name)
        files.append(name)
        _, pval = histogram_chi2(res, results["random", p])
        summary.append([sc, p, res.frequency(-1), res.discard_fraction, res.all_discarded_rounds, pval])
    header = ("scenario", "bitflip_p", "draw_frequency", "discard_fraction", "all_discarded_rounds", "chi2_p_vs_random")
    _write_csv(out / "qmr2_summary.csv", header, summary)
    files.append("qmr2_summary.csv")
    echo = {"k": k, "iterations": iterations, "policy": InvalidPolicy(policy).value,
            "seed": seed, "noise": list(noise), "scenarios": list(QMR2_SCENARIOS)}
    _write_manifest(out, echo, files, started)
    return results


def report(out_dir):
    """Plain-text table of every CSV found in ``out_dir``."""
    out_dir = Path(out_dir)
    paths = sorted(out_dir.glob("*.csv"))
    if not paths:
        raise FileNotFoundError(f"no CSV outputs in {out_dir}")
    lines = []
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        lines.append(f"== {path.name}")
        widths = [max(len(_short(r[i])) for r in rows) for i in range(len(rows[0]))]
        for r in rows:
            lines.append("  ".join(_short(v).rjust(w) for v, w in zip(r, widths)))
    return "\n".join(lines)


def _short(v):
    try:
        f = float(v)
    except ValueError:
        return v
    if f.is_integer() and "." not in v:
        return v
    return f"{f:.4g}"
