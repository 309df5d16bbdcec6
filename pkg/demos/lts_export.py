"""
Exporting a model as a transition system
=========================================

Each point becomes a state.  Edges between equally labelled points become
``tau`` steps, other edges carry the change of labels and a direction tag,
and every atom adds a self-loop.  The result is Aldebaran ``.aut`` text
that branching-bisimulation tools can read.
"""

from qdcm.bisim import compute_bisimilarity
from qdcm.figures import copa_example, king_grid_5x5
from qdcm.lts import encode_lts, write_aut

m = copa_example()
print(write_aut(encode_lts(m)), end="")

# on an undirected grid the classes a branching minimiser would find
# are exactly the copa classes
grid = king_grid_5x5()
lts = encode_lts(grid)
print(f"grid: {lts.states} states, {len(lts.transitions)} transitions,",
      compute_bisimilarity(grid, "copa").count, "copa classes")
