"""
Entangled voter blocks
======================

A GHZ block of k voters always casts k identical ballots (all ABC or
all CBA), so a mini-round can never tie.  Independent voters with the
same marginals tie whenever the split is even.
"""

import numpy as np

from qmrlab import DRAW, Qmr2Config, VoterBlockSpec, qmr2_constitution_analytic, run_qmr2
from qmrlab.qmr2 import histogram_chi2

for kind in ("ghz", "separable"):
    res = run_qmr2(Qmr2Config(blocks=[VoterBlockSpec(kind, 4)], iterations=10_000, seed=3))
    print(f"{kind:>9}: draws {res.frequency(DRAW):.4f}  ABC {res.frequency(0):.4f}  CBA {res.frequency(5):.4f}")
print("binomial draw rate for 4 fair coins: 6/16 =", 6 / 16)

# %%
# Heavy bit-flip noise wipes out the correlation entirely.
kw = dict(iterations=10_000, bitflip_p=0.5, invalid_policy="modulo")
ghz = run_qmr2(Qmr2Config(blocks=[VoterBlockSpec("ghz", 5)], seed=4, **kw))
rnd = run_qmr2(Qmr2Config(blocks=[VoterBlockSpec("random", 5)], seed=5, **kw))
stat, p = histogram_chi2(ghz, rnd)
print(f"GHZ vs uniform ballots at p=0.5: chi2={stat:.2f}, p-value={p:.3f}")

# %%
# The plurality constitution in closed form, for dephased ballots
prof = np.array([[0.5, 0, 0, 0, 0, 0.5]] * 3)
print("three fair ABC/CBA voters:", np.round(qmr2_constitution_analytic(prof), 4))
