"""
Inside one QMR draw
===================

For a single realised ballot multiset we walk the four stages by hand:
majority digraph, strongly connected components, the uniform mix over
linear extensions, then minority mixing and unanimity enforcement.
"""

from qmrlab import (
    build_majority_digraph,
    chi1,
    eu_step,
    gms_step,
    linear_extensions,
    parse_ranking,
    ranking_str,
    tarjan_scc,
)
from qmrlab.preferences import enumerate_rankings

NAMES = [ranking_str(r) for r in enumerate_rankings(3)]


def show(label, d):
    print(f"{label:>6}:", {NAMES[i]: round(float(x), 4) for i, x in enumerate(d) if x > 1e-12})


# A Condorcet cycle plus one extra vote for ABC
ballots = [parse_ranking(s) for s in ("ABC", "BCA", "CAB", "ABC")]

g = build_majority_digraph(ballots)
print("margins:\n", g.margins)
print("edges:\n", g.edges.astype(int))

parts = tarjan_scc(g)
print("components (sources first):", [["ABC"[a] for a in c] for c in parts.components])
print("linear extensions:", [NAMES[i] for i in linear_extensions(parts)])

c1 = chi1(ballots)
show("chi1", c1)

c2, k = gms_step(c1, ballots, delta=0.1)
print("pairs some voter holds but chi1 ignores:", [f"{'ABC'[a]}>{'ABC'[b]}" for a, b in k])
show("gms", c2)

show("eu", eu_step(c2, ballots))

# %%
# Same thing with a unanimous pair: everyone puts A above C
ballots = [parse_ranking(s) for s in ("ABC", "BAC", "ACB")]
c2, _ = gms_step(chi1(ballots), ballots, delta=0.1)
show("gms", c2)
show("eu", eu_step(c2, ballots))
