"""
Unanimity and IIA on random electorates
=======================================

Draw electorates where every voter agrees on at least one pair, run the
aggregator, and confirm the society keeps that pair.
"""

import numpy as np

from qmrlab import QmrParams, check_qiia, check_quantum_unanimity, qmr_aggregate
from qmrlab.preferences import pair_masks

rng = np.random.default_rng(0)
masks = pair_masks(3)

ok_unan = ok_iia = 0
for trial in range(200):
    a, b = rng.choice(3, size=2, replace=False)
    allowed = np.flatnonzero(masks[a, b])
    n = rng.integers(1, 5)
    prof = np.zeros((n, 6))
    for v in range(n):
        pick = rng.choice(allowed, size=rng.integers(1, 4), replace=False)
        prof[v, pick] = rng.dirichlet(np.ones(len(pick)))
    rho = qmr_aggregate(prof, QmrParams(delta=0.1))
    ok_unan += check_quantum_unanimity(prof, rho) == (True, True)
    ok_iia += check_qiia(prof, rho, prof, rho) == (True, True)

print(f"unanimity held on {ok_unan}/200, IIA reflexivity on {ok_iia}/200")
