"""
Readout noise and winner stability
==================================

Each voter's ballot lives on three qubits.  We flip every measured bit
with probability p, rebuild the electorate from the shots and aggregate.
Watch the winner hold until the noise gets heavy, then scatter.

Set QMRLAB_OUT to keep the CSV/JSONL files somewhere specific.
"""

import tempfile
from dataclasses import replace

from qmrlab import experiments as ex

for preset in (ex.preset_experiment_1, ex.preset_experiment_2):
    cfg = replace(preset(), runs=40)  # fewer runs than the preset to keep this quick
    out = ex.resolve_out_dir(tempfile.mkdtemp(prefix=f"{cfg.name}-"), None)
    rep = ex.run_sweep(cfg, out)
    print(f"--- {cfg.name}  (reference winner {'ABC'[rep.reference]}, files in {out})")
    print(f"{'p':>5} {'gamma_win':>9} {'flip_norm':>9} {'js_mean':>8}")
    for row in rep.rows:
        r = dict(zip(ex.METRIC_COLUMNS, row))
        print(f"{r['noise_p']:>5} {r['gamma_win']:>9.2f} {r['flip_rate_norm']:>9.2f} {r['js_mean']:>8.3f}")
    print()

# %%
# What the invalid-label policy does at p = 0.5: the readout no longer
# depends on the input, so the policy alone decides the winner.
from qmrlab import NoiseConfig, QmrParams, deterministic_profile, run_batch

prof = deterministic_profile([1, 2, 3, 4, 5], 3)
for policy in ("discard", "modulo", "nearest"):
    b = run_batch(prof, 500, 40, NoiseConfig(0.5, policy, seed=1), QmrParams(delta=0.0))
    winners = [r.winner for r in b.runs]
    share = {c: winners.count(i) / len(winners) for i, c in enumerate("ABC")}
    print(f"{policy:>8}: winner shares {share}")
