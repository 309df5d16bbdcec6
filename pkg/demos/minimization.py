"""
Minimising a model by bisimilarity
===================================

Three equivalences are available.  ``cm`` looks one step backwards, ``cmc``
one step both ways, and ``copa`` compares whole paths up to stuttering.
Each one yields a partition, a quotient model, and for any two points it
does not merge a formula that tells them apart.
"""

from qdcm.bisim import compute_bisimilarity, distinguishing_formula, is_bisimulation, quotient
from qdcm.figures import cm_example, copa_example
from qdcm.logic import to_text

m = cm_example()
for kind in ["cm", "cmc", "copa"]:
    part = compute_bisimilarity(m, kind)
    print(f"{kind:5s} {part.count} blocks:", part.named_blocks(m))

# x3 looks like x1 and x2 going backwards, but not forwards
f = distinguishing_formula(m, "x1", "x3", "cmc")
print("x1 vs x3 under cmc:", to_text(f))

# a candidate relation is checked clause by clause
bad = is_bisimulation(m, {("v1", "v2"), ("v2", "v1")}, "cm")
print("{(v1, v2)} under cm:", bad.describe(m))

# paths see x and u alike, one-step neighbourhoods do not
c = copa_example()
print("x vs u under copa:", distinguishing_formula(c, "x", "u", "copa"))
print("x vs u under cmc: ", to_text(distinguishing_formula(c, "x", "u", "cmc")))

q, members = quotient(c, compute_bisimilarity(c, "copa"))
print("quotient:", list(q.edges()), members)
