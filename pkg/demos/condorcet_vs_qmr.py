"""
Classical majority vs the quantum majority rule
===============================================

Two five-voter electorates over three candidates.  In the first every
ballot is different and C wins each pairwise contest 3 to 2; in the
second A wins comfortably.  We tally them classically, then run them through the QMR
pipeline with and without the minority mixing step.
"""

import numpy as np

from qmrlab import (
    QmrParams,
    condorcet_winner,
    deterministic_profile,
    enumerate_rankings,
    pairwise_expectations,
    qmr_aggregate,
    ranking_str,
    winner_from_distribution,
)

NAMES = [ranking_str(r) for r in enumerate_rankings(3)]

electorates = {
    "exp1": [1, 2, 3, 4, 5],  # ACB BAC BCA CAB CBA
    "exp2": [0, 0, 1, 1, 2],  # ABC ABC ACB ACB BAC
}

for name, ballots in electorates.items():
    prof = deterministic_profile(ballots, 3)
    tally = pairwise_expectations(prof)
    print(f"--- {name}: ballots {[NAMES[i] for i in ballots]}")
    print("pairwise support (row beats column):")
    print(tally.expected.astype(int))
    print("Condorcet winner:", "ABC"[condorcet_winner(tally)])

    # delta=0 turns off the minority step; the output collapses onto one ranking
    for delta in (0.0, 0.1):
        rho = qmr_aggregate(prof, QmrParams(delta=delta))
        top = {NAMES[i]: round(float(x), 4) for i, x in enumerate(rho) if x > 0}
        print(f"delta={delta}: rho_soc {top}  winner {'ABC'[winner_from_distribution(rho)]}")
    print()

# %%
# A voter who is unsure: half ABC, half CBA.  The society now mixes.
prof = np.array([[0.5, 0, 0, 0, 0, 0.5], [1, 0, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0]])
rho = qmr_aggregate(prof, QmrParams(delta=0.1))
print("mixed electorate:", {NAMES[i]: round(float(x), 4) for i, x in enumerate(rho) if x > 1e-12})
